#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "frontlp/estimator.hpp"
#include "frontlp/frontier.hpp"
#include "frontlp/lp_model.hpp"

using namespace frontlp;

namespace {

const KernelSpec& kernel()
{
  static const KernelSpec k = KernelSpec::make_default();
  return k;
}

const FrontierFn& sine_frontier()
{
  static const FrontierFn f = FrontierFn::sine(1.0, 0.5);
  return f;
}

EstimatorModel fit_sine(int n, std::uint64_t seed)
{
  const FrontierFn& f = sine_frontier();
  const SampleSet s = sample_uniform_on_S(f, n, seed);
  return fit(s, kernel(), FitConstants{2.0, f.l_beta, f.f_max});
}

double sum_alpha(const EstimatorModel& m)
{
  return std::accumulate(m.alpha.begin(), m.alpha.end(), 0.0);
}

}  // namespace

TEST_CASE("bandwidth schedule: closed form, clamping, validation")
{
  const Bandwidth bw = schedule_bandwidth(400, 2.0, 1.0);
  CHECK(bw.h == doctest::Approx(0.24650420617344226).epsilon(1e-15));
  CHECK_FALSE(bw.clamped);
  CHECK(bw.h1 == 1.0);
  CHECK(bw.beta == 2.0);

  const Bandwidth small = schedule_bandwidth(2, 2.0, 1.0);
  CHECK(small.h == 0.49);
  CHECK(small.clamped);

  const Bandwidth big_h1 = schedule_bandwidth(10000, 2.0, 50.0);
  CHECK(big_h1.h == 0.49);
  CHECK(big_h1.clamped);

  CHECK_THROWS_AS(schedule_bandwidth(1, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(schedule_bandwidth(100, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(schedule_bandwidth(100, 2.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(schedule_bandwidth(100, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("fit produces a validated nonnegative combination")
{
  const EstimatorModel m = fit_sine(200, 7);
  CHECK(m.sample.n == 200);
  CHECK(m.objective > 0.0);
  CHECK(m.diagnostics.relaxation_level == 0);
  CHECK(m.diagnostics.max_residual <= 1e-7);
  CHECK_FALSE(m.support.empty());
  for (double a : m.alpha) CHECK(a >= 0.0);
  for (int i : m.support) CHECK(m.alpha[i] != 0.0);
  CHECK(m.c_alpha == doctest::Approx(8.0 * 1.5));
  // objective is the coefficient mass
  CHECK(m.objective == doctest::Approx(sum_alpha(m)).epsilon(1e-12));
}

TEST_CASE("fit rejects bad inputs")
{
  const SampleSet tiny = make_sample_set({0.5}, {1.0});
  CHECK_THROWS_AS(fit(tiny, kernel(), FitConstants{2.0, 1.0, 1.0}),
                  std::invalid_argument);
  const SampleSet two = make_sample_set({0.3, 0.7}, {1.0, 1.0});
  CHECK_THROWS_AS(fit(two, kernel(), FitConstants{2.0, 1.0, -1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit(two, kernel(), FitConstants{2.0, -1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("surface integral equals the coefficient mass")
{
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const EstimatorModel m = fit_sine(150, seed);
    const double sa = sum_alpha(m);
    CHECK(std::abs(surface(m) - sa) <= 1e-6 * std::max(1.0, sa));
  }
}

TEST_CASE("estimate covers the data and stays nonnegative")
{
  const EstimatorModel m = fit_sine(200, 11);
  for (int i = 0; i < m.sample.n; ++i)
    CHECK(eval_estimate(m, m.sample.xs[i], 0) >= m.sample.ys[i] - 1e-7);
  for (int g = 0; g <= 500; ++g)
    CHECK(eval_estimate(m, g / 500.0, 0) >= -1e-9);
}

TEST_CASE("solution satisfies a freshly rebuilt constraint system")
{
  const FrontierFn& f = sine_frontier();
  const SampleSet s = sample_uniform_on_S(f, 180, 13);
  const EstimatorModel m = fit(s, kernel(), FitConstants{2.0, f.l_beta, f.f_max});
  FrontierLP lp = build_lp(s, kernel(), m.bandwidth,
                           LpConstants{f.l_beta, m.c_alpha, f.f_max});
  lp.curvature_rhs = m.diagnostics.second_deriv_bound;
  const FeasibilityReport rep = validate_solution(lp, m.alpha, 1e-7);
  CHECK(rep.pass);
  CHECK(rep.min_alpha >= -1e-9);
}

TEST_CASE("derivatives agree with finite differences of the estimate")
{
  const EstimatorModel m = fit_sine(150, 17);
  const double e = 1e-6;
  for (double x : {0.11, 0.33, 0.52, 0.74, 0.93}) {
    const double fd1 =
        (eval_estimate(m, x + e, 0) - eval_estimate(m, x - e, 0)) / (2 * e);
    CHECK(fd1 == doctest::Approx(eval_estimate(m, x, 1)).epsilon(1e-5));
    const double fd2 = (eval_estimate(m, x + e, 0) - 2 * eval_estimate(m, x, 0) +
                        eval_estimate(m, x - e, 0)) /
                       (e * e);
    CHECK(fd2 == doctest::Approx(eval_estimate(m, x, 2)).epsilon(1e-2));
  }
  CHECK_THROWS_AS((void)eval_estimate(m, 0.5, 3), std::invalid_argument);
}

TEST_CASE("evaluation clamps out-of-range abscissas and reports it")
{
  const EstimatorModel m = fit_sine(100, 19);
  bool clamped = false;
  const double at_zero = eval_estimate(m, 0.0, 0, &clamped);
  CHECK_FALSE(clamped);
  CHECK(eval_estimate(m, -0.25, 0, &clamped) == at_zero);
  CHECK(clamped);
  const double at_one = eval_estimate(m, 1.0, 0);
  CHECK(eval_estimate(m, 1.75, 0, &clamped) == at_one);
  CHECK(clamped);
}

TEST_CASE("L1 error agrees with a dense Riemann oracle")
{
  const FrontierFn& f = sine_frontier();
  const EstimatorModel m = fit_sine(150, 23);
  const double fast = l1_error(m, f);
  const int grid = 200001;
  double riemann = 0.0;
  for (int g = 0; g < grid; ++g) {
    const double x = (g + 0.5) / grid;
    riemann += std::abs(eval_estimate(m, x, 0) - f.eval(x, 0));
  }
  riemann /= grid;
  CHECK(fast == doctest::Approx(riemann).epsilon(1e-5));
  CHECK(fast > 0.0);
}

TEST_CASE("diagnostics report the scheduled regime and hard bounds")
{
  const FrontierFn& f = sine_frontier();
  const EstimatorModel m = fit_sine(200, 7);
  const LemmaReport rep = lemma_diagnostics(
      m, DiagnosticsConstants{f.l_beta, m.c_alpha, f.f_max, f.f_min}, &f);
  // h = (log n / n)^{1/3} makes log n / (n h^3) exactly one
  CHECK(rep.realized_ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.lipschitz_pass);
  CHECK(rep.sup_d1 <= rep.lipschitz_bound + 1e-9);
  CHECK(rep.lipschitz_bound ==
        doctest::Approx(3.0 * m.c_alpha * kernel().sup_constant(1) /
                        m.bandwidth.h));
  CHECK(rep.min_fhat >= -1e-12);
  CHECK(rep.surface_dev <= 1e-6);
  CHECK(rep.has_truth);
  CHECK(rep.shortfall >= 0.0);
  CHECK(rep.objective_gap == doctest::Approx(m.objective - f.c_f));
  CHECK(rep.rate_scale ==
        doctest::Approx(std::pow(std::log(200.0) / 200.0, 2.0 / 3.0)));

  const LemmaReport blind = lemma_diagnostics(
      m, DiagnosticsConstants{f.l_beta, m.c_alpha, f.f_max, f.f_min});
  CHECK_FALSE(blind.has_truth);
  CHECK(blind.sup_d1 == rep.sup_d1);
}

TEST_CASE("model JSON round-trips the estimate exactly")
{
  const EstimatorModel m = fit_sine(120, 29);
  const std::string text = model_to_json(m);
  const EstimatorModel back = model_from_json(text);
  CHECK(back.alpha == m.alpha);
  CHECK(back.sample.xs == m.sample.xs);
  CHECK(back.bandwidth.h == m.bandwidth.h);
  CHECK(back.c_alpha == m.c_alpha);
  CHECK(back.objective == m.objective);
  CHECK(back.support == m.support);
  CHECK(model_to_json(back) == text);
  for (double x : {0.0, 0.2, 0.55, 0.9})
    CHECK(eval_estimate(back, x, 0) == eval_estimate(m, x, 0));

  CHECK_THROWS_AS(model_from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(model_from_json("{\"n\": 2}"), std::invalid_argument);
}

TEST_CASE("fits are deterministic")
{
  const EstimatorModel a = fit_sine(150, 31);
  const EstimatorModel b = fit_sine(150, 31);
  CHECK(a.alpha == b.alpha);
  CHECK(a.objective == b.objective);
  CHECK(model_to_json(a) == model_to_json(b));
}
