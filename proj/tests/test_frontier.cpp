#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "frontlp/frontier.hpp"
#include "frontlp/quadrature.hpp"

using namespace frontlp;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

TEST_CASE("built-in frontiers report their analytic constants")
{
  const FrontierFn c = FrontierFn::constant(2.5);
  CHECK(c.f_min == 2.5);
  CHECK(c.f_max == 2.5);
  CHECK(c.c_f == 2.5);
  CHECK(c.l_beta == 0.0);
  CHECK(c.lipschitz() == 0.0);

  const FrontierFn s = FrontierFn::sine(1.0, 0.5);
  CHECK(s.f_min == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.f_max == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(s.c_f == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.l_beta == doctest::Approx(0.5 * kTwoPi * kTwoPi).epsilon(1e-15));
  CHECK(s.lipschitz() == doctest::Approx(0.5 * kTwoPi).epsilon(1e-15));

  const FrontierFn ss = FrontierFn::sum_of_sines(1.0, 0.3, 0.2);
  // numeric extrema agree with direct quadrature for the mean
  const double mean = simpson([&](double x) { return ss.eval(x, 0); },
                              0.0, 1.0, 4096);
  CHECK(ss.c_f == doctest::Approx(mean).epsilon(1e-10));
  CHECK(ss.f_min > 0.0);
  CHECK(ss.f_max > ss.f_min);
}

TEST_CASE("frontiers are 1-periodic")
{
  for (const FrontierFn& f :
       {FrontierFn::sine(1.0, 0.5), FrontierFn::sum_of_sines(1.0, 0.3, 0.2),
        FrontierFn::user_table({0.0, 0.4, 0.8}, {1.0, 2.0, 1.5})}) {
    for (int i = 0; i < 101; ++i) {
      const double x = double(i) / 100.0;
      CHECK(f.eval(x + 1.0, 0) == doctest::Approx(f.eval(x, 0)).epsilon(1e-12));
      CHECK(f.eval(x - 2.0, 0) == doctest::Approx(f.eval(x, 0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sine derivatives match finite differences")
{
  const FrontierFn s = FrontierFn::sine(1.0, 0.5);
  const double e = 1e-6;
  for (double x : {0.0, 0.13, 0.5, 0.77, 0.999}) {
    const double fd1 = (s.eval(x + e, 0) - s.eval(x - e, 0)) / (2 * e);
    CHECK(fd1 == doctest::Approx(s.eval(x, 1)).epsilon(1e-6));
    const double fd2 =
        (s.eval(x + e, 0) - 2 * s.eval(x, 0) + s.eval(x - e, 0)) / (e * e);
    CHECK(fd2 == doctest::Approx(s.eval(x, 2)).epsilon(1e-3));
  }
  // Hoelder/Lipschitz property of f' on random pairs
  for (int i = 0; i < 200; ++i) {
    const double x = double(i) / 200.0, y = double((i * 37) % 200) / 200.0;
    CHECK(std::abs(s.eval(x, 1) - s.eval(y, 1)) <=
          s.l_beta * std::abs(x - y) + 1e-12);
  }
}

TEST_CASE("frontier constructors validate their arguments")
{
  CHECK_THROWS_AS(FrontierFn::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(FrontierFn::constant(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(FrontierFn::sine(0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(FrontierFn::sine(1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(FrontierFn::user_table({0.1}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(FrontierFn::user_table({0.5, 0.1}, {1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FrontierFn::user_table({0.1, 0.5}, {1.0, -1.0}),
                  std::invalid_argument);
  const FrontierFn t = FrontierFn::user_table({0.1, 0.5}, {1.0, 2.0});
  CHECK_THROWS_AS((void)t.eval(0.3, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)t.eval(0.3, 3), std::invalid_argument);
}

TEST_CASE("user-table frontier interpolates linearly and periodically")
{
  const FrontierFn t = FrontierFn::user_table({0.2, 0.6}, {1.0, 2.0});
  CHECK(t.eval(0.2, 0) == doctest::Approx(1.0));
  CHECK(t.eval(0.4, 0) == doctest::Approx(1.5));
  CHECK(t.eval(0.6, 0) == doctest::Approx(2.0));
  // between 0.6 and 1.2 (= 0.2 next period) interpolate 2.0 -> 1.0
  CHECK(t.eval(0.9, 0) == doctest::Approx(1.5));
  CHECK(t.eval(0.0, 0) == doctest::Approx(t.eval(1.0, 0)).epsilon(1e-14));
}

TEST_CASE("sampler is deterministic, ordered and below the frontier")
{
  const FrontierFn f = FrontierFn::sine(1.0, 0.5);
  const SampleSet a = sample_uniform_on_S(f, 500, 42);
  const SampleSet b = sample_uniform_on_S(f, 500, 42);
  const SampleSet c = sample_uniform_on_S(f, 500, 43);
  CHECK(a.xs == b.xs);
  CHECK(a.ys == b.ys);
  CHECK(a.xs != c.xs);
  CHECK(a.n == 500);
  for (int i = 1; i < a.n; ++i) CHECK(a.xs[i] >= a.xs[i - 1]);
  for (int i = 0; i < a.n; ++i) {
    CHECK(a.xs[i] >= 0.0);
    CHECK(a.xs[i] < 1.0);
    CHECK(a.ys[i] >= 0.0);
    CHECK(a.ys[i] <= f.eval(a.xs[i], 0));
  }
  // acceptance rate concentrates near c_f / f_max = 2/3
  CHECK(a.acceptance_rate == doctest::Approx(f.c_f / f.f_max).epsilon(0.1));
}

TEST_CASE("periodic index extension")
{
  const FrontierFn f = FrontierFn::sine(1.0, 0.5);
  const SampleSet s = sample_uniform_on_S(f, 50, 7);
  const int n = s.n;
  CHECK_THROWS_AS((void)s.periodic_index(-n), std::out_of_range);
  CHECK_THROWS_AS((void)s.periodic_index(2 * n + 1), std::out_of_range);
  for (int i = 1; i <= n; ++i) {
    CHECK(s.periodic_index(i).base == i);
    CHECK(s.periodic_index(i).xshift == 0.0);
    CHECK(s.x_at(i) == s.xs[i - 1]);
    // one period to the right / left
    CHECK(s.x_at(i + n) == doctest::Approx(s.x_at(i) + 1.0));
    CHECK(s.y_at(i + n) == s.y_at(i));
    if (i - n >= 1 - n) {
      CHECK(s.x_at(i - n) == doctest::Approx(s.x_at(i) - 1.0));
      CHECK(s.y_at(i - n) == s.y_at(i));
    }
  }
  // extended abscissas are nondecreasing over the whole range
  for (int i = 2 - n; i <= 2 * n; ++i) CHECK(s.x_at(i) >= s.x_at(i - 1));
}

TEST_CASE("maximum spacing stays within its logarithmic bound (Monte Carlo)")
{
  const FrontierFn f = FrontierFn::sine(1.0, 0.5);
  int pass = 0;
  const int trials = 50;
  for (int seed = 1; seed <= trials; ++seed) {
    const SampleSet s = sample_uniform_on_S(f, 500, seed);
    const SpacingCheck c = max_spacing_check(s, f);
    CHECK(c.bound ==
          doctest::Approx(5.0 * 3.0 * std::log(500.0) / 500.0).epsilon(1e-12));
    if (c.pass) ++pass;
  }
  // the bound is an asymptotic high-probability event; expect near-certain
  CHECK(pass >= int(trials * 0.95));
}

TEST_CASE("CSV round-trip is byte-exact")
{
  const FrontierFn f = FrontierFn::sine(1.0, 0.5);
  const SampleSet s = sample_uniform_on_S(f, 100, 99);
  std::ostringstream first;
  write_sample_csv(first, s);
  std::istringstream in(first.str());
  const SampleSet back = read_sample_csv(in);
  CHECK(back.xs == s.xs);
  CHECK(back.ys == s.ys);
  std::ostringstream second;
  write_sample_csv(second, back);
  CHECK(second.str() == first.str());
}

TEST_CASE("CSV errors carry line numbers")
{
  {
    std::istringstream in("a,b\n0.1,0.2\n");
    CHECK_THROWS_WITH_AS(read_sample_csv(in), "line 1: expected header 'x,y'",
                         std::invalid_argument);
  }
  {
    std::istringstream in("x,y\n0.1,0.2\nnope\n");
    CHECK_THROWS_WITH_AS(read_sample_csv(in), "line 3: expected 'x,y' pair",
                         std::invalid_argument);
  }
  {
    std::istringstream in("x,y\n0.1,zz\n");
    CHECK_THROWS_AS(read_sample_csv(in), std::invalid_argument);
  }
}

TEST_CASE("JSON round-trip preserves the sample exactly")
{
  const FrontierFn f = FrontierFn::sine(1.0, 0.5);
  const SampleSet s = sample_uniform_on_S(f, 64, 5);
  const SampleSet back = sample_from_json(sample_to_json(s));
  CHECK(back.n == s.n);
  CHECK(back.seed == s.seed);
  CHECK(back.xs == s.xs);
  CHECK(back.ys == s.ys);
  CHECK_THROWS_AS(sample_from_json("{\"n\": 3}"), std::exception);
}

TEST_CASE("make_sample_set validates and sorts")
{
  const SampleSet s = make_sample_set({0.9, 0.1, 0.5}, {1.0, 2.0, 3.0});
  CHECK(s.xs == std::vector<double>{0.1, 0.5, 0.9});
  CHECK(s.ys == std::vector<double>{2.0, 3.0, 1.0});
  CHECK_THROWS_AS(make_sample_set({0.1}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_sample_set({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_sample_set({1.5}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_sample_set({0.5}, {-1.0}), std::invalid_argument);
}

TEST_CASE("marginal distribution of X matches the density f / C_f")
{
  // Kolmogorov-Smirnov style check of the empirical CDF of X against the
  // quadrature CDF; one fixed seed, generous critical value.
  const FrontierFn f = FrontierFn::sine(1.0, 0.5);
  const int n = 20000;
  const SampleSet s = sample_uniform_on_S(f, n, 2024);
  auto cdf = [&](double x) {
    return (x + (0.5 / kTwoPi) * (1.0 - std::cos(kTwoPi * x))) / f.c_f;
  };
  double dmax = 0.0;
  for (int i = 0; i < n; ++i) {
    const double F = cdf(s.xs[i]);
    dmax = std::max(dmax, std::abs(F - double(i + 1) / n));
    dmax = std::max(dmax, std::abs(F - double(i) / n));
  }
  // 0.1% KS critical value ~ 1.95 / sqrt(n)
  CHECK(dmax < 1.95 / std::sqrt(double(n)));
}
