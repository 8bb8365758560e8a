#include "frontlp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "frontlp/util.hpp"

namespace frontlp {

namespace {

FrontierFn frontier_from_json(const nlohmann::json& j)
{
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant")
    return FrontierFn::constant(j.value("a0", 1.0));
  if (kind == "sine")
    return FrontierFn::sine(j.value("a0", 1.0), j.value("a1", 0.5));
  if (kind == "sum_of_sines")
    return FrontierFn::sum_of_sines(j.value("a0", 1.0), j.value("a1", 0.5),
                                    j.value("a2", 0.0));
  if (kind == "user_table")
    return FrontierFn::user_table(j.at("xs").get<std::vector<double>>(),
                                  j.at("ys").get<std::vector<double>>());
  throw std::invalid_argument("unknown frontier kind '" + kind + "'");
}

double median_of(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  if (k == 0) return 0.0;
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

int default_parallelism()
{
  if (const char* env = std::getenv("FRONTIER_LP_THREADS")) {
    const int p = std::atoi(env);
    if (p > 0) return p;
  }
  return 1;
}

}  // namespace

void StudyConfig::validate() const
{
  if (n_grid.empty()) throw std::invalid_argument("n_grid must be nonempty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2)
      throw std::invalid_argument("n_grid entries must be >= 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("n_grid must be strictly increasing");
  }
  if (replications < 3)
    throw std::invalid_argument("replications must be >= 3");
  if (!(beta > 1.0 && beta <= 2.0))
    throw std::invalid_argument("beta must lie in (1, 2]");
  if (!(h1 > 0.0)) throw std::invalid_argument("h1 must be positive");
  if (parallelism < 0)
    throw std::invalid_argument("parallelism must be >= 0");
}

std::uint64_t derive_seed(std::uint64_t base_seed, int n, int r)
{
  return splitmix64(splitmix64(base_seed ^ (std::uint64_t(n) << 20)) ^
                    std::uint64_t(r));
}

StudyReport run_study(const StudyConfig& cfg)
{
  cfg.validate();
  const double f_max = cfg.f_max > 0 ? cfg.f_max : cfg.frontier.f_max;
  const double f_min = cfg.f_min > 0 ? cfg.f_min : cfg.frontier.f_min;
  const double l_beta = cfg.l_beta > 0 ? cfg.l_beta : cfg.frontier.l_beta;
  const double c_alpha = cfg.c_alpha > 0 ? cfg.c_alpha : 8.0 * f_max;

  const int reps = cfg.replications;
  const int n_count = int(cfg.n_grid.size());
  const int total = n_count * reps;
  std::vector<StudyRow> rows(total);

  const KernelSpec kernel = KernelSpec::make_default();
  auto run_one = [&](int task) {
    const int ni = task / reps;
    const int r = task % reps;
    StudyRow& row = rows[task];
    row.n = cfg.n_grid[ni];
    row.seed = derive_seed(cfg.base_seed, row.n, r);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const SampleSet s = sample_uniform_on_S(cfg.frontier, row.n, row.seed);
      const EstimatorModel m =
          fit(s, kernel, FitConstants{cfg.beta, l_beta, f_max}, cfg.h1,
              c_alpha);
      row.h = m.bandwidth.h;
      row.l1_error = l1_error(m, cfg.frontier);
      row.relaxation_level = m.diagnostics.relaxation_level;
      const LemmaReport rep = lemma_diagnostics(
          m, DiagnosticsConstants{l_beta, c_alpha, f_max, f_min},
          &cfg.frontier);
      row.objective_gap = rep.objective_gap;
      row.shortfall = rep.shortfall;
      row.diagnostics_pass = rep.lipschitz_pass && rep.min_fhat >= -1e-12 &&
                             rep.surface_dev <= 1e-6;
    } catch (const std::exception&) {
      row.failed = true;
    }
    row.solve_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
  };

  const int par = std::min(
      cfg.parallelism > 0 ? cfg.parallelism : default_parallelism(), total);
  if (par <= 1) {
    for (int t = 0; t < total; ++t) run_one(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(par);
    for (int w = 0; w < par; ++w)
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < total; t = next.fetch_add(1))
          run_one(t);
      });
    for (auto& th : pool) th.join();
  }

  StudyReport report;
  report.rows = std::move(rows);
  report.theory_slope = cfg.beta / (1.0 + cfg.beta);

  std::vector<std::pair<int, double>> rate_points;
  for (int ni = 0; ni < n_count; ++ni) {
    MedianRow med;
    med.n = cfg.n_grid[ni];
    std::vector<double> l1s, gaps, shorts;
    for (int r = 0; r < reps; ++r) {
      const StudyRow& row = report.rows[ni * reps + r];
      if (row.failed) {
        ++med.failures;
        continue;
      }
      l1s.push_back(row.l1_error);
      gaps.push_back(row.objective_gap);
      shorts.push_back(row.shortfall);
    }
    if (med.failures * 5 > reps)
      throw std::runtime_error("study failed: > 20% unrecoverable fits at n=" +
                               std::to_string(med.n));
    med.l1_median = median_of(l1s);
    med.gap_median = median_of(gaps);
    med.shortfall_median = median_of(shorts);
    report.medians.push_back(med);
    rate_points.emplace_back(med.n, med.l1_median);
  }
  report.rate_fit = fit_rate(rate_points);
  return report;
}

RateFit fit_rate(const std::vector<std::pair<int, double>>& points)
{
  RateFit fit;
  std::vector<double> xs, ys;
  for (const auto& [n, err] : points) {
    if (n < 2) throw std::invalid_argument("fit_rate needs n >= 2");
    if (err <= 0.0) {
      ++fit.excluded;
      continue;
    }
    xs.push_back(std::log(std::log(double(n)) / n));
    ys.push_back(std::log(err));
  }
  const int k = int(xs.size());
  if (k < 4) return fit;  // not enough distinct n: no rate estimate

  double mx = 0, my = 0;
  for (int i = 0; i < k; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < k; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.present = true;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0;
  for (int i = 0; i < k; ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ssr += e * e;
  }
  fit.r2 = syy == 0.0 ? 1.0 : 1.0 - ssr / syy;
  fit.stderr_slope = k > 2 ? std::sqrt(ssr / (k - 2) / sxx) : 0.0;
  return fit;
}

StudyConfig study_config_from_json(const std::string& text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("study config: ") + e.what());
  }
  StudyConfig cfg;
  try {
    cfg.frontier = frontier_from_json(j.at("frontier"));
    cfg.beta = j.value("beta", 2.0);
    cfg.l_beta = j.value("l_beta", 0.0);
    cfg.f_max = j.value("f_max", 0.0);
    cfg.f_min = j.value("f_min", 0.0);
    cfg.n_grid = j.at("n_grid").get<std::vector<int>>();
    cfg.replications = j.at("replications").get<int>();
    cfg.base_seed = j.value("base_seed", std::uint64_t(0));
    cfg.h1 = j.value("h1", 1.0);
    cfg.c_alpha = j.value("c_alpha", 0.0);
    cfg.parallelism = j.value("parallelism", 0);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("study config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string study_report_to_json(const StudyReport& rep, bool include_meta)
{
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    nlohmann::json row = {
        {"n", r.n},
        {"seed", r.seed},
        {"h", r.h},
        {"l1_error", r.l1_error},
        {"objective_gap", r.objective_gap},
        {"shortfall", r.shortfall},
        {"relaxation_level", r.relaxation_level},
        {"diagnostics_pass", r.diagnostics_pass},
        {"failed", r.failed},
    };
    if (include_meta) row["solve_time"] = r.solve_time;
    j["rows"].push_back(std::move(row));
  }
  j["medians"] = nlohmann::json::array();
  for (const auto& m : rep.medians)
    j["medians"].push_back({{"n", m.n},
                            {"l1_median", m.l1_median},
                            {"gap_median", m.gap_median},
                            {"shortfall_median", m.shortfall_median},
                            {"failures", m.failures}});
  j["rate_fit"] = {{"present", rep.rate_fit.present},
                   {"slope", rep.rate_fit.slope},
                   {"intercept", rep.rate_fit.intercept},
                   {"stderr", rep.rate_fit.stderr_slope},
                   {"r2", rep.rate_fit.r2},
                   {"excluded", rep.rate_fit.excluded}};
  j["theory_slope"] = rep.theory_slope;
  if (include_meta) {
    j["meta"] = {
        {"generated_at_unix",
         std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
             .count()},
    };
  }
  return j.dump(2);
}

void study_report_to_csv(std::ostream& os, const StudyReport& rep,
                         bool include_meta)
{
  os << "n,seed,h,l1_error,objective_gap,shortfall,relaxation_level,"
        "diagnostics_pass,failed";
  if (include_meta) os << ",solve_time";
  os << '\n';
  for (const auto& r : rep.rows) {
    os << r.n << ',' << r.seed << ',' << format_double(r.h) << ','
       << format_double(r.l1_error) << ',' << format_double(r.objective_gap)
       << ',' << format_double(r.shortfall) << ',' << r.relaxation_level << ','
       << (r.diagnostics_pass ? 1 : 0) << ',' << (r.failed ? 1 : 0);
    if (include_meta) os << ',' << format_double(r.solve_time);
    os << '\n';
  }
}

}  // namespace frontlp
