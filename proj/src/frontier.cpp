#include "frontlp/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "frontlp/util.hpp"
#include "nlohmann/json.hpp"

namespace frontlp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double reduce_mod1(double x)
{
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;  // guards x = -tiny rounding up
  return r;
}

// Grid search plus golden-section polish for extrema of a smooth periodic g.
template <class G>
double extremum(G&& g, bool maximize)
{
  const int grid = 20001;
  double best = maximize ? -1e300 : 1e300, best_x = 0;
  for (int i = 0; i < grid; ++i) {
    const double x = double(i) / (grid - 1);
    const double v = g(x);
    if (maximize ? v > best : v < best) {
      best = v;
      best_x = x;
    }
  }
  double a = best_x - 1.0 / (grid - 1), b = best_x + 1.0 / (grid - 1);
  const double inv_phi = 0.6180339887498949;
  auto val = [&](double x) { return maximize ? g(x) : -g(x); };
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = val(x1), f2 = val(x2);
  for (int it = 0; it < 120; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = val(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = val(x1);
    }
  }
  const double polished = std::max(f1, f2);
  return maximize ? std::max(best, polished) : std::min(best, -polished);
}

}  // namespace

FrontierFn FrontierFn::constant(double c)
{
  if (!(c > 0)) throw std::invalid_argument("constant frontier must be positive");
  FrontierFn f;
  f.kind = FrontierKind::constant;
  f.a0 = c;
  f.f_min = f.f_max = f.c_f = c;
  f.l_beta = 0.0;
  return f;
}

FrontierFn FrontierFn::sine(double a0, double a1)
{
  if (!(a0 - std::abs(a1) > 0))
    throw std::invalid_argument("sine frontier requires a0 > |a1|");
  FrontierFn f;
  f.kind = FrontierKind::sine;
  f.a0 = a0;
  f.a1 = a1;
  f.f_min = a0 - std::abs(a1);
  f.f_max = a0 + std::abs(a1);
  f.c_f = a0;
  f.l_beta = std::abs(a1) * kTwoPi * kTwoPi;  // sup |f''|
  return f;
}

FrontierFn FrontierFn::sum_of_sines(double a0, double a1, double a2)
{
  FrontierFn f;
  f.kind = FrontierKind::sum_of_sines;
  f.a0 = a0;
  f.a1 = a1;
  f.a2 = a2;
  f.c_f = a0;
  f.f_min = extremum([&](double x) { return f.eval(x, 0); }, false);
  f.f_max = extremum([&](double x) { return f.eval(x, 0); }, true);
  if (!(f.f_min > 0))
    throw std::invalid_argument("sum-of-sines frontier must stay positive");
  f.l_beta = std::max(extremum([&](double x) { return f.eval(x, 2); }, true),
                      -extremum([&](double x) { return f.eval(x, 2); }, false));
  return f;
}

FrontierFn FrontierFn::user_table(std::vector<double> xs, std::vector<double> ys)
{
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("user table needs >= 2 matched points");
  if (!std::is_sorted(xs.begin(), xs.end()))
    throw std::invalid_argument("user table abscissas must be sorted");
  FrontierFn f;
  f.kind = FrontierKind::user_table;
  f.table_x = std::move(xs);
  f.table_y = std::move(ys);
  f.f_min = *std::min_element(f.table_y.begin(), f.table_y.end());
  f.f_max = *std::max_element(f.table_y.begin(), f.table_y.end());
  if (!(f.f_min > 0))
    throw std::invalid_argument("user table frontier must be positive");
  // Piecewise-linear periodic interpolant: trapezoid rule is exact.
  double acc = 0.0;
  double prev_x = 0.0, prev_y = f.eval(0.0, 0);
  for (std::size_t i = 0; i < f.table_x.size(); ++i) {
    if (f.table_x[i] <= 0.0 || f.table_x[i] >= 1.0) continue;
    acc += 0.5 * (prev_y + f.table_y[i]) * (f.table_x[i] - prev_x);
    prev_x = f.table_x[i];
    prev_y = f.table_y[i];
  }
  acc += 0.5 * (prev_y + f.eval(1.0, 0)) * (1.0 - prev_x);
  f.c_f = acc;
  f.l_beta = 0.0;
  return f;
}

double FrontierFn::eval(double x, int order) const
{
  if (order < 0 || order > 2)
    throw std::invalid_argument("frontier derivative order must be in 0..2");
  const double u = reduce_mod1(x);
  switch (kind) {
    case FrontierKind::constant:
      return order == 0 ? a0 : 0.0;
    case FrontierKind::sine: {
      const double w = kTwoPi;
      if (order == 0) return a0 + a1 * std::sin(w * u);
      if (order == 1) return a1 * w * std::cos(w * u);
      return -a1 * w * w * std::sin(w * u);
    }
    case FrontierKind::sum_of_sines: {
      const double w = kTwoPi, w2 = 2.0 * kTwoPi;
      if (order == 0) return a0 + a1 * std::sin(w * u) + a2 * std::cos(w2 * u);
      if (order == 1)
        return a1 * w * std::cos(w * u) - a2 * w2 * std::sin(w2 * u);
      return -a1 * w * w * std::sin(w * u) - a2 * w2 * w2 * std::cos(w2 * u);
    }
    case FrontierKind::user_table: {
      if (order > 0)
        throw std::invalid_argument("user-table frontier has no derivatives");
      // Periodic piecewise-linear interpolation.
      auto it = std::upper_bound(table_x.begin(), table_x.end(), u);
      double x0, y0, x1, y1;
      if (it == table_x.begin()) {
        x0 = table_x.back() - 1.0;
        y0 = table_y.back();
        x1 = table_x.front();
        y1 = table_y.front();
      } else if (it == table_x.end()) {
        x0 = table_x.back();
        y0 = table_y.back();
        x1 = table_x.front() + 1.0;
        y1 = table_y.front();
      } else {
        const auto idx = it - table_x.begin();
        x0 = table_x[idx - 1];
        y0 = table_y[idx - 1];
        x1 = table_x[idx];
        y1 = table_y[idx];
      }
      const double t = (u - x0) / (x1 - x0);
      return y0 + t * (y1 - y0);
    }
  }
  return 0.0;
}

double FrontierFn::lipschitz() const
{
  switch (kind) {
    case FrontierKind::constant: return 0.0;
    case FrontierKind::sine: return std::abs(a1) * kTwoPi;
    case FrontierKind::sum_of_sines:
      return std::max(extremum([&](double x) { return eval(x, 1); }, true),
                      -extremum([&](double x) { return eval(x, 1); }, false));
    case FrontierKind::user_table: {
      double l = 0.0;
      for (std::size_t i = 0; i + 1 < table_x.size(); ++i)
        l = std::max(l, std::abs(table_y[i + 1] - table_y[i]) /
                            (table_x[i + 1] - table_x[i]));
      return l;
    }
  }
  return 0.0;
}

double eval_frontier(const FrontierFn& f, double x, int order)
{
  return f.eval(x, order);
}

namespace {

void finalize(SampleSet& s, double ratio_max_min)
{
  // Sort pairs by x, ties by y, keeping pairs matched.
  std::vector<int> order(s.xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (s.xs[a] != s.xs[b]) return s.xs[a] < s.xs[b];
    return s.ys[a] < s.ys[b];
  });
  std::vector<double> xs(s.xs.size()), ys(s.ys.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    xs[i] = s.xs[order[i]];
    ys[i] = s.ys[order[i]];
  }
  s.xs = std::move(xs);
  s.ys = std::move(ys);
  s.n = int(s.xs.size());

  double max_gap = s.xs.empty() ? 1.0 : s.xs.front();  // X_0 = 0
  for (int i = 1; i < s.n; ++i) max_gap = std::max(max_gap, s.xs[i] - s.xs[i - 1]);
  if (s.n > 0) max_gap = std::max(max_gap, 1.0 - s.xs.back());  // X_{N+1} = 1
  s.spacing_stats.max_gap = max_gap;
  s.spacing_stats.gap_bound =
      s.n >= 2 ? 5.0 * ratio_max_min * std::log(double(s.n)) / s.n : 1e300;
}

}  // namespace

SampleSet sample_uniform_on_S(const FrontierFn& f, int n, std::uint64_t seed)
{
  if (n < 1) throw std::invalid_argument("sample size must be >= 1");
  SampleSet s;
  s.seed = seed;
  s.xs.reserve(n);
  s.ys.reserve(n);
  std::mt19937_64 rng(seed);
  const double accept_est = f.c_f / f.f_max;
  const long long max_attempts =
      static_cast<long long>(std::ceil(1e4 * double(n) / accept_est));
  long long attempts = 0;
  while (int(s.xs.size()) < n) {
    if (++attempts > max_attempts)
      throw std::runtime_error("rejection sampling failed to terminate");
    const double x = to_unit_double(rng());
    const double y = f.f_max * to_unit_double(rng());
    if (y <= f.eval(x, 0)) {
      s.xs.push_back(x);
      s.ys.push_back(y);
    }
  }
  s.acceptance_rate = double(n) / double(attempts);
  finalize(s, f.f_max / f.f_min);
  return s;
}

SampleSet make_sample_set(std::vector<double> xs, std::vector<double> ys,
                          std::uint64_t seed, double f_max_over_f_min)
{
  if (xs.size() != ys.size())
    throw std::invalid_argument("xs/ys length mismatch");
  if (xs.empty()) throw std::invalid_argument("empty sample");
  for (double x : xs)
    if (!(x >= 0.0 && x <= 1.0))
      throw std::invalid_argument("sample abscissas must lie in [0,1]");
  for (double y : ys)
    if (!(y >= 0.0)) throw std::invalid_argument("sample ordinates must be >= 0");
  SampleSet s;
  s.seed = seed;
  s.xs = std::move(xs);
  s.ys = std::move(ys);
  finalize(s, f_max_over_f_min);
  return s;
}

SampleSet::PeriodicIndex SampleSet::periodic_index(int i) const
{
  if (i < 1 - n || i > 2 * n)
    throw std::out_of_range("periodic index outside [1-N, 2N]");
  if (i < 1) return {i + n, -1.0};
  if (i > n) return {i - n, +1.0};
  return {i, 0.0};
}

double SampleSet::x_at(int i) const
{
  const auto p = periodic_index(i);
  return xs[p.base - 1] + p.xshift;
}

double SampleSet::y_at(int i) const
{
  return ys[periodic_index(i).base - 1];
}

SpacingCheck max_spacing_check(const SampleSet& s, const FrontierFn& f)
{
  if (s.n < 2) throw std::invalid_argument("spacing check needs n >= 2");
  SpacingCheck c;
  c.max_gap = s.spacing_stats.max_gap;
  c.bound = 5.0 * (f.f_max / f.f_min) * std::log(double(s.n)) / s.n;
  c.pass = c.max_gap <= c.bound;
  return c;
}

void write_sample_csv(std::ostream& os, const SampleSet& s)
{
  os << "x,y\n";
  for (int i = 0; i < s.n; ++i)
    os << format_double(s.xs[i]) << ',' << format_double(s.ys[i]) << '\n';
}

SampleSet read_sample_csv(std::istream& is)
{
  std::string line;
  int lineno = 0;
  std::vector<double> xs, ys;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "x,y")
        throw std::invalid_argument("line 1: expected header 'x,y'");
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": expected 'x,y' pair");
    try {
      xs.push_back(parse_double(std::string_view(line).substr(0, comma)));
      ys.push_back(parse_double(std::string_view(line).substr(comma + 1)));
    } catch (const std::exception& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " +
                                  e.what());
    }
  }
  return make_sample_set(std::move(xs), std::move(ys));
}

std::string sample_to_json(const SampleSet& s)
{
  nlohmann::json j;
  j["n"] = s.n;
  j["seed"] = s.seed;
  j["xs"] = s.xs;
  j["ys"] = s.ys;
  return j.dump(2);
}

SampleSet sample_from_json(const std::string& text)
{
  const auto j = nlohmann::json::parse(text);
  SampleSet s = make_sample_set(j.at("xs").get<std::vector<double>>(),
                                j.at("ys").get<std::vector<double>>(),
                                j.at("seed").get<std::uint64_t>());
  if (j.at("n").get<int>() != s.n)
    throw std::invalid_argument("sample JSON: n does not match xs length");
  return s;
}

}  // namespace frontlp
