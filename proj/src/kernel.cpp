#include "frontlp/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "frontlp/quadrature.hpp"

namespace frontlp {

Bandwidth::Bandwidth(double h_, double h1_, double beta_)
    : h(h_), h1(h1_), beta(beta_)
{
  if (!(h > 0.0 && h < 0.5))
    throw std::invalid_argument("bandwidth h must lie in (0, 1/2)");
  if (!(beta > 1.0 && beta <= 2.0))
    throw std::invalid_argument("beta must lie in (1, 2]");
  if (!(h1 > 0.0)) throw std::invalid_argument("h1 must be positive");
}

namespace {

// Monomial coefficients of (1 - t^2)^degree.
std::vector<double> base_coeffs(int degree)
{
  std::vector<double> c(2 * degree + 1, 0.0);
  double binom = 1.0;
  for (int k = 0; k <= degree; ++k) {
    c[2 * k] = (k % 2 ? -binom : binom);
    binom = binom * (degree - k) / (k + 1);
  }
  return c;
}

std::vector<double> differentiate(const std::vector<double>& p)
{
  if (p.size() <= 1) return {0.0};
  std::vector<double> d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * double(i);
  return d;
}

double horner(const std::vector<double>& p, double t)
{
  double v = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * t + p[i];
  return v;
}

}  // namespace

KernelSpec::KernelSpec(int degree) : degree_(degree)
{
  if (degree < 5)
    throw std::invalid_argument(
        "kernel degree must be >= 5 to keep K in C^4 across [-1,1]");

  deriv_.push_back(base_coeffs(degree));
  for (int k = 1; k <= 6; ++k) deriv_.push_back(differentiate(deriv_[k - 1]));

  // Exact normalization: int_{-1}^{1} t^{2k} dt = 2/(2k+1).
  double integral = 0.0;
  const auto& p0 = deriv_[0];
  for (std::size_t i = 0; i < p0.size(); i += 2)
    integral += p0[i] * 2.0 / double(i + 1);
  c_ = 1.0 / integral;

  // Sup norms of |K^(k)| over [-1,1]: dense grid plus golden-section polish.
  auto sup_norm = [this](int order) {
    const int grid = 200001;
    double best = 0.0, best_t = 0.0;
    for (int i = 0; i < grid; ++i) {
      const double t = -1.0 + 2.0 * i / (grid - 1);
      const double v = std::abs(eval_raw(t, order));
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    const double step = 2.0 / (grid - 1);
    double a = std::max(-1.0, best_t - step), b = std::min(1.0, best_t + step);
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = std::abs(eval_raw(x1, order)), f2 = std::abs(eval_raw(x2, order));
    for (int it = 0; it < 200; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + inv_phi * (b - a);
        f2 = std::abs(eval_raw(x2, order));
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - inv_phi * (b - a);
        f1 = std::abs(eval_raw(x1, order));
      }
    }
    return std::max({best, f1, f2});
  };
  sup_.K_max = sup_norm(0);
  sup_.K1_max = sup_norm(1);
  sup_.K2_max = sup_norm(2);
  sup_.K4_max = sup_norm(4);
}

double KernelSpec::sup_constant(int order) const
{
  switch (order) {
    case 0: return sup_.K_max;
    case 1: return sup_.K1_max;
    case 2: return sup_.K2_max;
    case 4: return sup_.K4_max;
    default: throw std::invalid_argument("sup constant kept for orders 0,1,2,4");
  }
}

double KernelSpec::eval_raw(double t, int order) const
{
  if (std::abs(t) >= 1.0) return 0.0;
  return c_ * horner(deriv_[order], t);
}

double KernelSpec::eval(double t, int order) const
{
  if (order < 0 || order > 4)
    throw std::invalid_argument("kernel derivative order must be in 0..4");
  return eval_raw(t, order);
}

double KernelSpec::eval_periodic(const Bandwidth& bw, double x, double t,
                                 int x_order) const
{
  if (x_order < 0 || x_order > 4)
    throw std::invalid_argument("kernel derivative order must be in 0..4");
  const double h = bw.h;
  const double scale = std::pow(h, -1.0 - x_order);
  double acc = 0.0;
  for (int j = -1; j <= 1; ++j) {
    const double u = (x - t + j) / h;
    if (std::abs(u) < 1.0) acc += scale * c_ * horner(deriv_[x_order], u);
  }
  return acc;
}

double BochnerReport::max_deviation() const
{
  return std::max({dev_mass_u, dev_moment_u, dev_mass_x, dev_moment_x});
}

namespace {

// Integral over u in [0,1] of (u - x)^moment * K_h(x,u), Simpson panels
// aligned to the kernel breakpoints x-h, x, x+h shifted by -1,0,+1.
double integral_over_u(const KernelSpec& spec, const Bandwidth& bw, double x,
                       int moment)
{
  std::vector<double> bp;
  for (int j = -1; j <= 1; ++j)
    for (double off : {-bw.h, 0.0, bw.h}) {
      const double b = x + j + off;
      if (b > 0.0 && b < 1.0) bp.push_back(b);
    }
  auto f = [&](double u) {
    const double k = spec.eval_periodic(bw, x, u, 0);
    return moment == 0 ? k : (u - x) * k;
  };
  return simpson_piecewise(f, 0.0, 1.0, std::move(bp), 256);
}

double integral_over_x(const KernelSpec& spec, const Bandwidth& bw, double u,
                       int moment)
{
  std::vector<double> bp;
  for (int j = -1; j <= 1; ++j)
    for (double off : {-bw.h, 0.0, bw.h}) {
      const double b = u + j + off;
      if (b > 0.0 && b < 1.0) bp.push_back(b);
    }
  // The first-moment factor is the signed periodic difference x - u + j on
  // wrap branch j (the hv of the change of variables v = (x - u + j)/h);
  // the raw x - u would pick up the tail mass at the boundary.
  auto f = [&](double x) {
    if (moment == 0) return spec.eval_periodic(bw, x, u, 0);
    double acc = 0.0;
    for (int j = -1; j <= 1; ++j) {
      const double d = x - u + j;
      acc += d * spec.eval(d / bw.h, 0) / bw.h;
    }
    return acc;
  };
  return simpson_piecewise(f, 0.0, 1.0, std::move(bp), 256);
}

}  // namespace

BochnerReport check_bochner_identities(const KernelSpec& spec,
                                       const Bandwidth& bw, int grid_size)
{
  if (grid_size < 10) throw std::invalid_argument("grid_size must be >= 10");
  BochnerReport rep;
  for (int i = 0; i < grid_size; ++i) {
    const double x = double(i) / (grid_size - 1);
    rep.dev_mass_u = std::max(rep.dev_mass_u,
                              std::abs(integral_over_u(spec, bw, x, 0) - 1.0));
    if (x >= bw.h && x <= 1.0 - bw.h)
      rep.dev_moment_u =
          std::max(rep.dev_moment_u, std::abs(integral_over_u(spec, bw, x, 1)));
    const double u = x;
    rep.dev_mass_x = std::max(rep.dev_mass_x,
                              std::abs(integral_over_x(spec, bw, u, 0) - 1.0));
    rep.dev_moment_x =
        std::max(rep.dev_moment_x, std::abs(integral_over_x(spec, bw, u, 1)));
  }
  return rep;
}

}  // namespace frontlp
