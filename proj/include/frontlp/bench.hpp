#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "frontlp/estimator.hpp"
#include "frontlp/frontier.hpp"

namespace frontlp {

// Monte Carlo convergence study over a grid of sample sizes.
struct StudyConfig {
  FrontierFn frontier;
  double beta = 2.0;
  double l_beta = 0;  // <= 0: taken from the frontier
  double f_max = 0;   // <= 0: taken from the frontier
  double f_min = 0;   // <= 0: taken from the frontier
  std::vector<int> n_grid;
  int replications = 0;
  std::uint64_t base_seed = 0;
  double h1 = 1.0;
  double c_alpha = 0;  // <= 0: default 8 f_max
  int parallelism = 0; // 0: FRONTIER_LP_THREADS env var, else 1

  void validate() const;  // throws std::invalid_argument
};

struct StudyRow {
  int n = 0;
  std::uint64_t seed = 0;
  double h = 0;
  double l1_error = 0;
  double objective_gap = 0;  // J* - C_f
  double shortfall = 0;      // grid sup of (f - f_hat)_+
  int relaxation_level = 0;
  double solve_time = 0;  // seconds; metadata, excluded in no-meta output
  bool diagnostics_pass = false;
  bool failed = false;  // unrecoverable fit; excluded from aggregates
};

struct RateFit {
  bool present = false;
  double slope = 0;
  double intercept = 0;
  double stderr_slope = 0;
  double r2 = 0;
  int excluded = 0;  // nonpositive medians dropped before the regression
};

struct MedianRow {
  int n = 0;
  double l1_median = 0;
  double gap_median = 0;
  double shortfall_median = 0;
  int failures = 0;
};

struct StudyReport {
  std::vector<StudyRow> rows;       // n-major, replication-minor order
  std::vector<MedianRow> medians;   // one per n
  RateFit rate_fit;
  double theory_slope = 0;  // beta / (1 + beta)
};

// Deterministic replication seed for (n, r) under a base seed.
std::uint64_t derive_seed(std::uint64_t base_seed, int n, int r);

// Runs n_grid x replications fits; rows assemble in deterministic order
// regardless of scheduling.  Throws if any n fails on > 20% of its
// replications.
StudyReport run_study(const StudyConfig& cfg);

// OLS of log(median_error) on log(log n / n) over (n, median_error) points.
// Needs >= 4 distinct n with positive errors, otherwise present = false.
RateFit fit_rate(const std::vector<std::pair<int, double>>& points);

StudyConfig study_config_from_json(const std::string& text);
std::string study_report_to_json(const StudyReport& rep, bool include_meta);
void study_report_to_csv(std::ostream& os, const StudyReport& rep,
                         bool include_meta);

}  // namespace frontlp
