#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "frontlp/bench.hpp"

using namespace frontlp;

namespace {

StudyConfig small_config()
{
  StudyConfig cfg;
  cfg.frontier = FrontierFn::sine(1.0, 0.5);
  cfg.beta = 2.0;
  cfg.n_grid = {40, 60, 90};
  cfg.replications = 3;
  cfg.base_seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("replication seeds are deterministic and collision-averse")
{
  CHECK(derive_seed(1, 100, 0) == derive_seed(1, 100, 0));
  CHECK(derive_seed(1, 100, 0) != derive_seed(1, 100, 1));
  CHECK(derive_seed(1, 100, 0) != derive_seed(1, 200, 0));
  CHECK(derive_seed(1, 100, 0) != derive_seed(2, 100, 0));
  // a modest birthday check over a realistic grid
  std::vector<std::uint64_t> seen;
  for (int n : {100, 200, 400, 800, 1600})
    for (int r = 0; r < 50; ++r) seen.push_back(derive_seed(99, n, r));
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("rate regression recovers exact power laws")
{
  auto synth = [](double slope, double scale) {
    std::vector<std::pair<int, double>> pts;
    for (int n : {100, 200, 400, 800, 1600, 3200})
      pts.emplace_back(n, scale * std::pow(std::log(double(n)) / n, slope));
    return pts;
  };
  {
    const RateFit fit = fit_rate(synth(2.0 / 3.0, 1.7));
    REQUIRE(fit.present);
    CHECK(fit.slope == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(1.7)).epsilon(1e-10));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.stderr_slope <= 1e-10);
    CHECK(fit.excluded == 0);
  }
  {
    const RateFit fit = fit_rate(synth(0.5, 0.3));
    REQUIRE(fit.present);
    CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("rate regression needs four positive medians")
{
  std::vector<std::pair<int, double>> pts = {
      {100, 0.1}, {200, 0.08}, {400, 0.05}};
  CHECK_FALSE(fit_rate(pts).present);
  pts.emplace_back(800, 0.0);  // nonpositive: excluded, still only 3 usable
  const RateFit fit = fit_rate(pts);
  CHECK_FALSE(fit.present);
  CHECK(fit.excluded == 1);
  pts.emplace_back(1600, 0.02);
  CHECK(fit_rate(pts).present);
  CHECK_THROWS_AS(fit_rate({{1, 0.5}, {2, 0.4}, {4, 0.3}, {8, 0.2}}),
                  std::invalid_argument);
}

TEST_CASE("study configuration is validated")
{
  StudyConfig cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.n_grid = {};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.n_grid = {100, 100};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.n_grid = {200, 100};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.replications = 2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.beta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.h1 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("study rows assemble deterministically in n-major order")
{
  const StudyConfig cfg = small_config();
  const StudyReport rep = run_study(cfg);
  REQUIRE(rep.rows.size() == 9);
  REQUIRE(rep.medians.size() == 3);
  int idx = 0;
  for (int n : cfg.n_grid)
    for (int r = 0; r < cfg.replications; ++r, ++idx) {
      CHECK(rep.rows[idx].n == n);
      CHECK(rep.rows[idx].seed == derive_seed(cfg.base_seed, n, r));
      CHECK_FALSE(rep.rows[idx].failed);
      CHECK(rep.rows[idx].l1_error > 0.0);
      CHECK(rep.rows[idx].h > 0.0);
    }
  CHECK(rep.theory_slope == doctest::Approx(2.0 / 3.0));
  // three n values are not enough for a rate estimate
  CHECK_FALSE(rep.rate_fit.present);
  // medians of three values are the middle order statistic
  for (int ni = 0; ni < 3; ++ni) {
    std::vector<double> l1s;
    for (int r = 0; r < 3; ++r) l1s.push_back(rep.rows[ni * 3 + r].l1_error);
    std::sort(l1s.begin(), l1s.end());
    CHECK(rep.medians[ni].l1_median == l1s[1]);
    CHECK(rep.medians[ni].failures == 0);
  }
}

TEST_CASE("parallel execution reproduces the serial report byte for byte")
{
  StudyConfig cfg = small_config();
  cfg.parallelism = 1;
  const std::string serial = study_report_to_json(run_study(cfg), false);
  cfg.parallelism = 3;
  const std::string parallel = study_report_to_json(run_study(cfg), false);
  CHECK(serial == parallel);
}

TEST_CASE("report serialization: no-meta mode is reproducible, meta is extra")
{
  const StudyConfig cfg = small_config();
  const StudyReport a = run_study(cfg);
  const StudyReport b = run_study(cfg);
  CHECK(study_report_to_json(a, false) == study_report_to_json(b, false));
  std::ostringstream csv_a, csv_b;
  study_report_to_csv(csv_a, a, false);
  study_report_to_csv(csv_b, b, false);
  CHECK(csv_a.str() == csv_b.str());
  // metadata mode contains timing fields the stable mode omits
  CHECK(study_report_to_json(a, true).find("solve_time") != std::string::npos);
  CHECK(study_report_to_json(a, false).find("solve_time") == std::string::npos);
  std::ostringstream csv_meta;
  study_report_to_csv(csv_meta, a, true);
  CHECK(csv_meta.str().find("solve_time") != std::string::npos);
}

TEST_CASE("CSV layout: header plus one line per row")
{
  const StudyReport rep = run_study(small_config());
  std::ostringstream os;
  study_report_to_csv(os, rep, false);
  const std::string text = os.str();
  std::istringstream in(text);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line ==
        "n,seed,h,l1_error,objective_gap,shortfall,relaxation_level,"
        "diagnostics_pass,failed");
  int count = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++count;
  CHECK(count == int(rep.rows.size()));
}

TEST_CASE("study config JSON parsing")
{
  const std::string text = R"({
    "frontier": {"kind": "sine", "a0": 1.0, "a1": 0.5},
    "beta": 2.0,
    "n_grid": [40, 60],
    "replications": 3,
    "base_seed": 11,
    "h1": 1.0
  })";
  const StudyConfig cfg = study_config_from_json(text);
  CHECK(cfg.frontier.kind == FrontierKind::sine);
  CHECK(cfg.n_grid == std::vector<int>{40, 60});
  CHECK(cfg.replications == 3);
  CHECK(cfg.base_seed == 11);
  CHECK_THROWS_AS(study_config_from_json("not json"), std::invalid_argument);
  CHECK_THROWS_AS(study_config_from_json("{}"), std::invalid_argument);
  CHECK_THROWS_AS(
      study_config_from_json(
          R"({"frontier": {"kind": "mystery"}, "n_grid": [40], "replications": 3})"),
      std::invalid_argument);
}
