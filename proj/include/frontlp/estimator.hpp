#pragma once

#include <string>
#include <vector>

#include "frontlp/frontier.hpp"
#include "frontlp/kernel.hpp"
#include "frontlp/lp_model.hpp"
#include "frontlp/simplex.hpp"

namespace frontlp {

// h = min(h1 (log n / n)^{1/(1+beta)}, 0.49); the clamp is recorded.
Bandwidth schedule_bandwidth(int n, double beta, double h1);

struct FitConstants {
  double beta = 2.0;
  double l_beta = 0;
  double f_max = 1.0;
};

// Fitted frontier f_hat(x) = sum_i alpha_i K_h(x, X_i).  Immutable after
// fit(); evaluation is pure and safe to call concurrently.
struct EstimatorModel {
  std::vector<double> alpha;
  SampleSet sample;
  Bandwidth bandwidth;
  KernelSpec kernel = KernelSpec::make_default();
  double c_alpha = 0;
  double objective = 0;  // J* = sum(alpha)

  struct Diagnostics {
    int relaxation_level = 0;
    long iterations = 0;
    double max_residual = 0;
    double second_deriv_bound = 0;  // curvature rhs actually enforced
  } diagnostics;

  // indices i with alpha_i != 0, ascending; speeds up evaluation
  std::vector<int> support;
  void rebuild_support();
};

// Schedules the bandwidth, builds and solves the LP (curvature relaxation
// on infeasibility), validates the solution against every row.
// c_alpha <= 0 selects the default 8 * f_max.
EstimatorModel fit(const SampleSet& s, const KernelSpec& k,
                   const FitConstants& consts, double h1 = 1.0,
                   double c_alpha = 0.0);

// d^order f_hat / dx^order at x, order 0..2.  x is clamped to [0,1];
// *clamped reports whether clamping occurred.
double eval_estimate(const EstimatorModel& m, double x, int order,
                     bool* clamped = nullptr);

// int_0^1 f_hat by breakpoint-aligned composite Simpson; agrees with
// sum(alpha) to 1e-6 * max(1, sum(alpha)).
double surface(const EstimatorModel& m);

// int_0^1 |f_hat - f|, panels split at kernel breakpoints and at sign
// changes of the difference (bisected to 1e-10); absolute tolerance 1e-7.
double l1_error(const EstimatorModel& m, const FrontierFn& f);

struct DiagnosticsConstants {
  double l_beta = 0;
  double c_alpha = 0;
  double f_max = 1.0;
  double f_min = 1.0;
};

struct LemmaReport {
  double sup_d1 = 0;            // sup over the grid of |f_hat'|
  double lipschitz_bound = 0;   // 3 C_alpha K1_max / h
  bool lipschitz_pass = false;  // hard bound

  double sup_d2 = 0;            // sup over the grid of |f_hat''|
  double curvature_bound = 0;   // 4 L_beta K2_max log N / (N h^3)
  bool curvature_pass = false;  // diagnostic only (asymptotic)

  double min_fhat = 0;     // grid min, expected >= -1e-12
  double surface_dev = 0;  // |surface - sum(alpha)|

  double realized_ratio = 0;  // log N / (N h^{1+beta})

  // Filled only when the true frontier is supplied:
  bool has_truth = false;
  double shortfall = 0;      // sup over the grid of (f - f_hat)_+
  double rate_scale = 0;     // (log N / N)^{beta/(1+beta)}
  double objective_gap = 0;  // J* - C_f
};

LemmaReport lemma_diagnostics(const EstimatorModel& m,
                              const DiagnosticsConstants& consts,
                              const FrontierFn* truth = nullptr);

// JSON schema: {n, h, h1, beta, C_alpha, alphas[], xs[], objective,
// diagnostics{}}.  Round-trips exactly.
std::string model_to_json(const EstimatorModel& m);
EstimatorModel model_from_json(const std::string& text);

}  // namespace frontlp
