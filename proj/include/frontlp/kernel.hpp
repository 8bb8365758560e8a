#pragma once

#include <array>
#include <vector>

namespace frontlp {

// Bandwidth h in (0, 1/2) together with the schedule parameters that
// produced it (prefactor h1, smoothness exponent beta in (1,2]).
struct Bandwidth {
  double h = 0.1;
  double h1 = 1.0;
  double beta = 2.0;
  bool clamped = false;  // set when the schedule hit the 0.49 cap

  Bandwidth() = default;
  Bandwidth(double h_, double h1_ = 1.0, double beta_ = 2.0);
};

// Base density K(t) = c (1 - t^2)^degree on [-1,1], zero outside.
// degree >= 5 keeps K four times continuously differentiable across the
// support boundary.  Immutable after construction.
class KernelSpec {
 public:
  struct SupConstants {
    double K_max = 0, K1_max = 0, K2_max = 0, K4_max = 0;
  };

  static KernelSpec make_default() { return KernelSpec(5); }
  explicit KernelSpec(int degree);

  double normalization_c() const { return c_; }
  int degree() const { return degree_; }
  const SupConstants& sup_constants() const { return sup_; }
  double sup_constant(int order) const;  // order in {0,1,2,4}

  // d^order K / dt^order at t; exactly 0 for |t| >= 1.  order in 0..4.
  double eval(double t, int order) const;

  // Periodic kernel: sum_{j=-1..1} h^{-1-k} K^{(k)}((x - t + j)/h),
  // k = x_order in 0..4.  At most one term is nonzero for h < 1/2.
  double eval_periodic(const Bandwidth& bw, double x, double t,
                       int x_order) const;

 private:
  double eval_raw(double t, int order) const;  // any order, no range check

  int degree_;
  double c_;
  SupConstants sup_;
  // deriv_[k] holds the monomial coefficients of K^(k) (without c).
  std::vector<std::vector<double>> deriv_;

  friend struct KernelAccess;
};

struct BochnerReport {
  double dev_mass_u = 0;       // sup_x |int_0^1 K_h(x,u) du - 1|
  double dev_moment_u = 0;     // sup_{x in [h,1-h]} |int (u-x) K_h du|
  double dev_mass_x = 0;       // sup_u |int_0^1 K_h(x,u) dx - 1|
  double dev_moment_x = 0;     // sup_u |int (x-u) K_h dx|
  double max_deviation() const;
};

// Numerically verifies the four kernel integral identities on grids of
// grid_size points.  grid_size >= 10.
BochnerReport check_bochner_identities(const KernelSpec& spec,
                                       const Bandwidth& bw, int grid_size);

inline KernelSpec make_default_kernel() { return KernelSpec::make_default(); }

inline double eval_K(const KernelSpec& spec, double t, int order)
{
  return spec.eval(t, order);
}

inline double eval_Kh(const KernelSpec& spec, const Bandwidth& bw, double x,
                      double t, int x_order)
{
  return spec.eval_periodic(bw, x, t, x_order);
}

}  // namespace frontlp
