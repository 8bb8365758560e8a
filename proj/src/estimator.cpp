#include "frontlp/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "frontlp/quadrature.hpp"

namespace frontlp {

Bandwidth schedule_bandwidth(int n, double beta, double h1)
{
  if (n < 2) throw std::invalid_argument("schedule_bandwidth needs n >= 2");
  if (!(beta > 1.0 && beta <= 2.0))
    throw std::invalid_argument("beta must lie in (1, 2]");
  if (!(h1 > 0.0)) throw std::invalid_argument("h1 must be positive");
  const double raw =
      h1 * std::pow(std::log(double(n)) / n, 1.0 / (1.0 + beta));
  Bandwidth bw(std::min(raw, 0.49), h1, beta);
  bw.clamped = raw > 0.49;
  return bw;
}

void EstimatorModel::rebuild_support()
{
  support.clear();
  for (int i = 0; i < int(alpha.size()); ++i)
    if (alpha[i] != 0.0) support.push_back(i);
}

EstimatorModel fit(const SampleSet& s, const KernelSpec& k,
                   const FitConstants& consts, double h1, double c_alpha)
{
  if (s.n < 2) throw std::invalid_argument("fit needs n >= 2");
  if (!(consts.f_max > 0.0))
    throw std::invalid_argument("f_max must be positive");
  if (consts.l_beta < 0.0)
    throw std::invalid_argument("l_beta must be nonnegative");
  if (c_alpha <= 0.0) c_alpha = 8.0 * consts.f_max;

  const Bandwidth bw = schedule_bandwidth(s.n, consts.beta, h1);
  const FrontierLP lp =
      build_lp(s, k, bw, LpConstants{consts.l_beta, c_alpha, consts.f_max});

  const SolveResult sol = solve_with_relaxation(lp);
  if (sol.status != SolveStatus::optimal) {
    std::string msg = "fit: LP not solvable (";
    msg += sol.status == SolveStatus::infeasible ? "infeasible after relaxation"
                                                 : "iteration limit";
    msg += ")";
    if (!sol.infeasible_rows.empty()) {
      msg += "; implicated rows:";
      for (std::size_t i = 0; i < sol.infeasible_rows.size() && i < 12; ++i)
        msg += " " + std::to_string(sol.infeasible_rows[i]);
    }
    throw std::runtime_error(msg);
  }

  EstimatorModel m;
  m.alpha = sol.alpha;
  // the solver can leave round-off dust just below zero; the model promises
  // nonnegative weights, so snap negligible negatives to exact zero
  for (double& a : m.alpha)
    if (a < 0.0 && a > -1e-12) a = 0.0;
  m.sample = s;
  m.bandwidth = bw;
  m.kernel = k;
  m.c_alpha = c_alpha;
  m.objective = sol.objective;
  m.diagnostics.relaxation_level = sol.relaxation_level;
  m.diagnostics.iterations = sol.iterations;
  m.diagnostics.max_residual = sol.max_residual;
  m.diagnostics.second_deriv_bound =
      lp.curvature_rhs * std::pow(2.0, sol.relaxation_level);
  m.rebuild_support();

  if (sol.max_residual > 1e-7)
    throw std::runtime_error("fit: solution failed post-solve validation");
  return m;
}

double eval_estimate(const EstimatorModel& m, double x, int order,
                     bool* clamped)
{
  if (order < 0 || order > 2)
    throw std::invalid_argument("eval_estimate order must be 0..2");
  bool cl = false;
  if (x < 0.0) {
    x = 0.0;
    cl = true;
  } else if (x > 1.0) {
    x = 1.0;
    cl = true;
  }
  if (clamped) *clamped = cl;

  const auto& xs = m.sample.xs;
  const double h = m.bandwidth.h;
  double acc = 0.0;
  for (int j = -1; j <= 1; ++j) {
    const double lo = x + j - h, hi = x + j + h;
    auto it = std::lower_bound(xs.begin(), xs.end(), lo);
    const auto end = std::upper_bound(it, xs.end(), hi);
    for (; it != end; ++it) {
      const int i = int(it - xs.begin());
      if (m.alpha[i] == 0.0) continue;
      acc += m.alpha[i] * m.kernel.eval((x - *it + j) / h, order);
    }
  }
  return acc * std::pow(h, -1.0 - order);
}

namespace {

double frac01(double x)
{
  const double f = x - std::floor(x);
  return f == 1.0 ? 0.0 : f;
}

// Kernel support edges {X_i +/- h mod 1} over the nonzero coefficients.
std::vector<double> kernel_breakpoints(const EstimatorModel& m)
{
  std::vector<double> bps;
  bps.reserve(2 * m.support.size());
  const double h = m.bandwidth.h;
  for (int i : m.support) {
    bps.push_back(frac01(m.sample.xs[i] - h));
    bps.push_back(frac01(m.sample.xs[i] + h));
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end(),
                        [](double a, double b) { return b - a < 1e-13; }),
            bps.end());
  return bps;
}

template <class F>
double integrate_panels(F&& f, const std::vector<double>& bps, double density)
{
  double acc = 0.0;
  double lo = 0.0;
  auto panel = [&](double a, double b) {
    if (b - a < 1e-13) return;
    const int sub = std::max(8, int(std::ceil((b - a) * density)));
    acc += simpson(f, a, b, sub);
  };
  for (double bp : bps) {
    if (bp <= 0.0 || bp >= 1.0) continue;
    panel(lo, bp);
    lo = bp;
  }
  panel(lo, 1.0);
  return acc;
}

}  // namespace

double surface(const EstimatorModel& m)
{
  if (m.support.empty()) return 0.0;
  const auto fhat = [&](double x) { return eval_estimate(m, x, 0); };
  return integrate_panels(fhat, kernel_breakpoints(m), 4000.0);
}

double l1_error(const EstimatorModel& m, const FrontierFn& f)
{
  std::vector<double> bps = kernel_breakpoints(m);
  if (f.kind == FrontierKind::user_table)
    for (double t : f.table_x) bps.push_back(frac01(t));

  const auto diff = [&](double x) {
    return eval_estimate(m, x, 0) - f.eval(x, 0);
  };

  // sign-change roots, located by scanning each panel then bisecting
  std::vector<double> cuts = bps;
  cuts.push_back(0.0);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> roots;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p], b = cuts[p + 1];
    if (b - a < 1e-12) continue;
    const int scan = 16;
    double prev_x = a, prev_v = diff(a);
    for (int s = 1; s <= scan; ++s) {
      const double x = a + (b - a) * s / scan;
      const double v = diff(x);
      if ((prev_v < 0.0) != (v < 0.0) && prev_v != 0.0)
        roots.push_back(bisect_root(diff, prev_x, x, 1e-10));
      prev_x = x;
      prev_v = v;
    }
  }
  bps.insert(bps.end(), roots.begin(), roots.end());
  bps.push_back(0.0);
  bps.push_back(1.0);
  std::sort(bps.begin(), bps.end());

  const auto absdiff = [&](double x) { return std::abs(diff(x)); };
  double acc = 0.0;
  for (std::size_t p = 0; p + 1 < bps.size(); ++p) {
    const double a = bps[p], b = bps[p + 1];
    if (b - a < 1e-13) continue;
    acc += simpson_adaptive(absdiff, a, b, 1e-8 * (b - a) + 1e-16);
  }
  return acc;
}

LemmaReport lemma_diagnostics(const EstimatorModel& m,
                              const DiagnosticsConstants& consts,
                              const FrontierFn* truth)
{
  LemmaReport rep;
  const int n = m.sample.n;
  const double h = m.bandwidth.h;
  const double beta = m.bandwidth.beta;
  const auto& sup = m.kernel.sup_constants();

  const int grid = 2000;
  double sum_alpha = 0.0;
  for (double a : m.alpha) sum_alpha += a;
  rep.min_fhat = std::numeric_limits<double>::infinity();
  for (int g = 0; g < grid; ++g) {
    const double x = double(g) / (grid - 1);
    const double f0 = eval_estimate(m, x, 0);
    rep.sup_d1 = std::max(rep.sup_d1, std::abs(eval_estimate(m, x, 1)));
    rep.sup_d2 = std::max(rep.sup_d2, std::abs(eval_estimate(m, x, 2)));
    rep.min_fhat = std::min(rep.min_fhat, f0);
    if (truth) {
      const double short_g = truth->eval(x, 0) - f0;
      rep.shortfall = std::max(rep.shortfall, short_g);
    }
  }
  rep.shortfall = std::max(rep.shortfall, 0.0);

  rep.lipschitz_bound = 3.0 * consts.c_alpha * sup.K1_max / h;
  rep.lipschitz_pass = rep.sup_d1 <= rep.lipschitz_bound + 1e-9;

  rep.curvature_bound =
      4.0 * consts.l_beta * sup.K2_max * std::log(double(n)) / (n * h * h * h);
  rep.curvature_pass = rep.sup_d2 <= rep.curvature_bound + 1e-9;

  rep.surface_dev = std::abs(surface(m) - sum_alpha);
  rep.realized_ratio =
      std::log(double(n)) / (n * std::pow(h, 1.0 + beta));

  if (truth) {
    rep.has_truth = true;
    rep.rate_scale =
        std::pow(std::log(double(n)) / n, beta / (1.0 + beta));
    rep.objective_gap = m.objective - truth->c_f;
  }
  return rep;
}

std::string model_to_json(const EstimatorModel& m)
{
  nlohmann::json j;
  j["n"] = m.sample.n;
  j["h"] = m.bandwidth.h;
  j["h1"] = m.bandwidth.h1;
  j["beta"] = m.bandwidth.beta;
  j["C_alpha"] = m.c_alpha;
  j["alphas"] = m.alpha;
  j["xs"] = m.sample.xs;
  j["objective"] = m.objective;
  j["diagnostics"] = {
      {"relaxation_level", m.diagnostics.relaxation_level},
      {"iterations", m.diagnostics.iterations},
      {"max_residual", m.diagnostics.max_residual},
      {"second_deriv_bound", m.diagnostics.second_deriv_bound},
  };
  return j.dump(2);
}

EstimatorModel model_from_json(const std::string& text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("model JSON: ") + e.what());
  }
  EstimatorModel m;
  try {
    m.alpha = j.at("alphas").get<std::vector<double>>();
    std::vector<double> xs = j.at("xs").get<std::vector<double>>();
    if (xs.size() != m.alpha.size())
      throw std::invalid_argument("alphas and xs lengths differ");
    if (int(xs.size()) != j.at("n").get<int>())
      throw std::invalid_argument("n does not match xs length");
    if (!std::is_sorted(xs.begin(), xs.end()))
      throw std::invalid_argument("xs must be sorted");
    m.sample.n = int(xs.size());
    m.sample.xs = std::move(xs);
    m.sample.ys.assign(m.sample.n, 0.0);
    m.bandwidth = Bandwidth(j.at("h").get<double>(), j.at("h1").get<double>(),
                            j.at("beta").get<double>());
    m.c_alpha = j.at("C_alpha").get<double>();
    m.objective = j.at("objective").get<double>();
    const auto& d = j.at("diagnostics");
    m.diagnostics.relaxation_level = d.at("relaxation_level").get<int>();
    m.diagnostics.iterations = d.at("iterations").get<long>();
    m.diagnostics.max_residual = d.at("max_residual").get<double>();
    m.diagnostics.second_deriv_bound =
        d.at("second_deriv_bound").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("model JSON: ") + e.what());
  }
  m.rebuild_support();
  return m;
}

}  // namespace frontlp
