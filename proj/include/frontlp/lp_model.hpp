#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "frontlp/frontier.hpp"
#include "frontlp/kernel.hpp"

namespace frontlp {

enum class RowSense { ge, le };

enum class RowKind { cover, curvature_plus, curvature_minus, bin_mass };

using SparseVec = std::vector<std::pair<int, double>>;  // (var index, coeff)

// One materialized constraint row.
struct ConstraintRow {
  RowKind kind = RowKind::cover;
  int i = -1;  // sample index (cover/curvature), 1-based; bin number for bins
  int j = 0;   // extended cover partner index (cover rows only)
  RowSense sense = RowSense::ge;
  double rhs = 0;
  SparseVec entries;
};

// Cover rows for a fixed i share the base vectors
//   u[k] = K_h(X_i, X_k)   and   v[k] = d/dx K_h(x, X_k) |_{x = X_i};
// the row for partner j is u + (X_j - X_i) v  >=  Y_j.
struct CoverGroup {
  int i = 0;  // 1-based
  SparseVec u, v;
  struct Point {
    int j;       // extended index in [1-N, 2N]
    double d;    // X_j - X_i (signed, |d| <= h)
    double rhs;  // Y_j
  };
  std::vector<Point> points;
};

struct LpMeta {
  double h = 0;
  double c_alpha = 0;
  double second_deriv_bound = 0;
  int m_h = 0;
  std::size_t n_cover_rows = 0;
  std::size_t n_curvature_rows = 0;
  std::size_t n_bin_rows = 0;
  bool c_alpha_warning = false;         // C_alpha < 8 f_max
  bool curvature_bound_warning = false; // bound > 1e12, constraint vacuous
};

struct LpConstants {
  double l_beta = 0;
  double c_alpha = 0;
  double f_max = 0;
};

// Sparse LP min sum(alpha) over cover/curvature/bin rows, alpha >= 0.
// Cover rows are stored group-wise; curvature rows pair up as +/-.
struct FrontierLP {
  int n_vars = 0;
  std::vector<double> xs, ys;  // sorted sample, copied for validation
  Bandwidth bandwidth;
  KernelSpec kernel = KernelSpec::make_default();

  std::vector<CoverGroup> cover;
  std::vector<SparseVec> curvature;  // per i: w[k] = d2/dx2 K_h at x = X_i
  double curvature_rhs = 0;
  std::vector<std::vector<int>> bins;  // per bin: 0-based var indices
  double bin_rhs = 0;
  LpMeta meta;

  std::size_t n_rows() const
  {
    return meta.n_cover_rows + meta.n_curvature_rows + meta.n_bin_rows;
  }

  // Materializes all rows in (kind, i, j/m) lexical order.
  std::vector<ConstraintRow> rows() const;
};

FrontierLP build_lp(const SampleSet& s, const KernelSpec& k,
                    const Bandwidth& h, const LpConstants& consts);

struct FeasibilityReport {
  double max_cover_violation = 0;
  double max_curvature_violation = 0;
  double max_bin_violation = 0;
  double min_alpha = 0;
  bool pass = false;
};

// Re-evaluates every row (including the implied ones) against alpha.
FeasibilityReport validate_solution(const FrontierLP& lp,
                                    const std::vector<double>& alpha,
                                    double tol);

// "frontier-lp v1" plain-text sparse exchange format.
void write_lp_text(std::ostream& os, const std::vector<ConstraintRow>& rows,
                   int n_vars);
void write_lp_text(std::ostream& os, const FrontierLP& lp);

struct GenericLP {
  int n_vars = 0;
  std::vector<ConstraintRow> rows;
  std::vector<double> costs;  // empty = all-ones objective
};
GenericLP read_lp_text(std::istream& is);

}  // namespace frontlp
