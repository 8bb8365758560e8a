#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace frontlp {

// Composite Simpson with m subintervals (m rounded up to even).
template <class F>
double simpson(F&& f, double a, double b, int m)
{
  if (b <= a) return 0.0;
  if (m < 2) m = 2;
  if (m % 2) ++m;
  const double step = (b - a) / m;
  double acc = f(a) + f(b);
  for (int i = 1; i < m; ++i) acc += f(a + i * step) * (i % 2 ? 4.0 : 2.0);
  return acc * step / 3.0;
}

// Composite Simpson on panels aligned to the given breakpoints.  Breakpoints
// outside (a,b) are ignored; each panel gets subdiv Simpson subintervals.
template <class F>
double simpson_piecewise(F&& f, double a, double b,
                         std::vector<double> breakpoints, int subdiv)
{
  breakpoints.push_back(a);
  breakpoints.push_back(b);
  std::sort(breakpoints.begin(), breakpoints.end());
  double acc = 0.0;
  double lo = a;
  for (double bp : breakpoints) {
    if (bp <= lo + 1e-14) continue;
    if (bp > b) break;
    acc += simpson(f, lo, bp, subdiv);
    lo = bp;
  }
  if (lo < b - 1e-14) acc += simpson(f, lo, b, subdiv);
  return acc;
}

// Adaptive Simpson to absolute tolerance tol.
namespace detail {
template <class F>
double adapt_step(F& f, double a, double b, double fa, double fm, double fb,
                  double whole, double tol, int depth)
{
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adapt_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adapt_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}
}  // namespace detail

template <class F>
double simpson_adaptive(F&& f, double a, double b, double tol, int max_depth = 40)
{
  if (b <= a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adapt_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Root of a continuous function on [a,b] with f(a), f(b) of opposite sign,
// bisected down to the given x-resolution.
template <class F>
double bisect_root(F&& f, double a, double b, double xtol)
{
  double fa = f(a);
  while (b - a > xtol) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fa < 0) == (fm < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace frontlp
