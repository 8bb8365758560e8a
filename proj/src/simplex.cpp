#include "frontlp/simplex.hpp"

#include <Eigen/Dense>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace frontlp {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Columns of the standard-form constraint matrix (structural + slack).
// Artificial columns are handled by the engine itself.
class ColumnSource {
 public:
  virtual ~ColumnSource() = default;
  virtual int num_cols() const = 0;
  virtual double cost(int j) const = 0;
  virtual void column(int j, SparseVec& out) const = 0;
  // out[j] = pi' A_j for every column.
  virtual void dots(const VectorXd& pi, std::vector<double>& out) const = 0;
};

class ExplicitSource : public ColumnSource {
 public:
  int m = 0;
  std::vector<double> costs;
  std::vector<SparseVec> cols;

  int num_cols() const override { return int(cols.size()); }
  double cost(int j) const override { return costs[j]; }
  void column(int j, SparseVec& out) const override { out = cols[j]; }
  void dots(const VectorXd& pi, std::vector<double>& out) const override
  {
    out.assign(cols.size(), 0.0);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      double acc = 0.0;
      for (const auto& [r, v] : cols[j]) acc += pi(r) * v;
      out[j] = acc;
    }
  }
};

struct EngineResult {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<double> x;   // structural values, size num_cols
  VectorXd pi;             // final simplex multipliers, size m
  double objective = 0;
  long iterations = 0;
  std::vector<int> bad_rows;                 // infeasible diagnostics
  std::vector<std::pair<int, double>> ray;   // unbounded certificate support
  std::vector<int> basis;                    // final basic column per row
  bool warm_start_failed = false;  // dual repair stalled; retry cold
};

constexpr double kPivotTol = 1e-7;
constexpr double kPivotTolLoose = 1e-10;
constexpr double kDegenTol = 1e-11;
constexpr int kEtaLimit = 600;

// Phase-1/phase-2 revised simplex with an LU-factorized basis and
// product-form eta updates.  Devex pricing (scale-invariant, important
// because cover/curvature/bin columns differ in norm by orders of
// magnitude), Bland fallback after a run of degenerate pivots.
// Deterministic for identical inputs.
class SimplexEngine {
 public:
  SimplexEngine(const ColumnSource& src, VectorXd b,
                std::vector<int> init_basis, const SolveOptions& opts)
      : src_(src),
        b_(std::move(b)),
        m_(int(b_.size())),
        ncols_(src.num_cols()),
        opts_(opts)
  {
    basis_.resize(m_);
    is_basic_.assign(ncols_, 0);
    for (int r = 0; r < m_; ++r) {
      const int j = init_basis[r];
      if (j >= 0) {
        basis_[r] = j;
        is_basic_[j] = 1;
      } else {
        basis_[r] = art0() + r;
        has_artificials_ = true;
      }
    }
    max_iters_ = opts.max_iters > 0 ? opts.max_iters
                                    : 20000 + 40L * m_ + long(ncols_);
  }

  // Run the dual simplex before the primal phases.  Valid when the basis
  // is dual feasible but primal infeasible, e.g. a warm start whose new
  // rows enter with negative slack values.
  void set_start_dual(bool v) { start_dual_ = v; }

  EngineResult run()
  {
    refactor();
    if (start_dual_) {
      EngineResult early;
      if (dual_repair(dual_iters_, early)) return early;
    }
    phase_ = has_artificials_ ? 1 : 2;
    std::vector<double> dots_buf, row_buf;
    VectorXd pi(m_), w(m_);
    SparseVec col;
    long iter = dual_iters_;
    long degen_streak = 0;
    const long bland_after = 3L * (m_ + ncols_);
    devex_.assign(ncols_, 1.0);

    while (true) {
      if (iter >= max_iters_) return finish(SolveStatus::iteration_limit, iter);

      // Pricing: Devex, i.e. most negative reduced cost per reference
      // weight.  Bland's lowest-index rule breaks degenerate stalls.
      VectorXd cB(m_);
      for (int r = 0; r < m_; ++r) cB(r) = phase_cost(basis_[r]);
      pi = btran(cB);
      src_.dots(pi, dots_buf);
      const bool bland = degen_streak > bland_after;
      int enter = -1;
      double best = 0.0;
      for (int j = 0; j < ncols_; ++j) {
        if (is_basic_[j]) continue;
        const double d = phase_cost(j) - dots_buf[j];
        if (d >= -opts_.tol_opt) continue;
        if (bland) {
          enter = j;
          break;  // lowest-index rule
        }
        const double score = d * d / devex_[j];
        if (score > best) {
          enter = j;
          best = score;
        }
      }

      if (enter < 0) {
        if (phase_ == 2) return finish(SolveStatus::optimal, iter);
        // Phase-1 optimum.
        double infeas = 0.0;
        for (int r = 0; r < m_; ++r)
          if (basis_[r] >= art0()) infeas += std::max(xB_(r), 0.0);
        if (infeas > opts_.tol_feas) {
          EngineResult res = finish(SolveStatus::infeasible, iter);
          for (int r = 0; r < m_; ++r)
            if (basis_[r] >= art0() && xB_(r) > opts_.tol_feas)
              res.bad_rows.push_back(r);
          return res;
        }
        drive_out_artificials();
        phase_ = 2;
        degen_streak = 0;
        devex_.assign(ncols_, 1.0);
        continue;
      }

      // Ratio test.
      src_.column(enter, col);
      w = ftran_sparse(col);

      int leave = -1;
      bool art_exit = false;
      for (int r = 0; r < m_; ++r) {
        // Basic artificials at zero leave first, on any usable pivot.
        if (basis_[r] >= art0() && std::abs(w(r)) > kPivotTol &&
            xB_(r) <= opts_.tol_feas) {
          leave = r;
          art_exit = true;
          break;
        }
      }
      double theta = 0.0;
      if (!art_exit) {
        double best_theta = std::numeric_limits<double>::infinity();
        for (int r = 0; r < m_; ++r) {
          if (w(r) <= kPivotTol) continue;
          const double t = std::max(xB_(r), 0.0) / w(r);
          if (t < best_theta - 1e-12 ||
              (t < best_theta + 1e-12 && leave >= 0 &&
               tie_break(r, leave))) {
            best_theta = t;
            leave = r;
          }
        }
        if (leave < 0) {
          // Retry loose pivots once after a clean refactorization.
          bool retried = false;
          if (!etas_r_.empty()) {
            refactor();
            w = ftran_sparse(col);
            retried = true;
          }
          for (int r = 0; r < m_; ++r) {
            if (w(r) <= kPivotTolLoose) continue;
            const double t = std::max(xB_(r), 0.0) / w(r);
            if (leave < 0 || t < best_theta) {
              best_theta = t;
              leave = r;
            }
          }
          (void)retried;
          if (leave < 0) {
            EngineResult res = finish(phase_ == 1 ? SolveStatus::infeasible
                                                  : SolveStatus::unbounded,
                                      iter);
            if (phase_ == 2) {
              res.ray.emplace_back(enter, 1.0);
              for (int r = 0; r < m_; ++r)
                if (std::abs(w(r)) > 1e-9 && basis_[r] < art0())
                  res.ray.emplace_back(basis_[r], -w(r));
            }
            return res;
          }
        }
        theta = best_theta;
      }

      // Devex reference-weight update from the pivot row.
      {
        const double aq = w(leave);
        if (std::abs(aq) > kPivotTolLoose) {
          VectorXd er = VectorXd::Zero(m_);
          er(leave) = 1.0;
          const VectorXd rho = btran(std::move(er));
          src_.dots(rho, row_buf);
          const double gq = devex_[enter];
          const double inv2 = 1.0 / (aq * aq);
          bool overflow = false;
          for (int j = 0; j < ncols_; ++j) {
            if (is_basic_[j] || j == enter || row_buf[j] == 0.0) continue;
            const double cand = row_buf[j] * row_buf[j] * inv2 * gq;
            if (cand > devex_[j]) devex_[j] = cand;
            if (devex_[j] > 1e12) overflow = true;
          }
          if (basis_[leave] < art0())  // weight of the leaving column
            devex_[basis_[leave]] = std::max(gq * inv2, 1.0);
          if (overflow) devex_.assign(ncols_, 1.0);  // new reference frame
        }
      }

      // Pivot.
      if (theta != 0.0) xB_.noalias() -= theta * w;
      xB_(leave) = theta;
      if (basis_[leave] < art0()) is_basic_[basis_[leave]] = 0;
      is_basic_[enter] = 1;
      basis_[leave] = enter;
      etas_r_.push_back(leave);
      etas_w_.push_back(w);
      ++iter;
      if (theta <= kDegenTol)
        ++degen_streak;
      else
        degen_streak = 0;
      if (int(etas_r_.size()) >= kEtaLimit || std::abs(w(leave)) < kPivotTol)
        refactor();
    }
  }

 private:
  int art0() const { return ncols_; }

  double phase_cost(int j) const
  {
    if (j >= art0()) return phase_ == 1 ? 1.0 : 0.0;
    return phase_ == 1 ? 0.0 : src_.cost(j);
  }

  // Dual simplex until xB >= 0.  Returns true (with res filled) on a
  // terminal outcome: infeasible, or a stall that asks for a cold restart.
  bool dual_repair(long& iters, EngineResult& res)
  {
    phase_ = 2;
    std::vector<double> dots_buf, row_buf;
    const long guard = 3L * m_ + 2000;
    while (true) {
      int leave = -1;
      double most = -opts_.tol_feas;
      for (int r = 0; r < m_; ++r)
        if (xB_(r) < most) {
          most = xB_(r);
          leave = r;
        }
      if (leave < 0) break;  // primal feasible, hand over to the primal
      if (iters > guard) {
        res = finish(SolveStatus::iteration_limit, iters);
        res.warm_start_failed = true;
        return true;
      }

      VectorXd er = VectorXd::Zero(m_);
      er(leave) = 1.0;
      const VectorXd rho = btran(std::move(er));
      src_.dots(rho, row_buf);
      VectorXd cB(m_);
      for (int r = 0; r < m_; ++r) cB(r) = phase_cost(basis_[r]);
      const VectorXd pi = btran(cB);
      src_.dots(pi, dots_buf);

      int enter = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int j = 0; j < ncols_; ++j) {
        if (is_basic_[j]) continue;
        const double a = row_buf[j];
        if (a >= -kPivotTol) continue;
        double rc = phase_cost(j) - dots_buf[j];
        if (rc < 0.0) rc = 0.0;  // clip pricing noise
        const double ratio = rc / -a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && enter >= 0 && j < enter)) {
          best_ratio = ratio;
          enter = j;
        }
      }
      if (enter < 0) {
        // no column can absorb the violated row: primal infeasible
        res = finish(SolveStatus::infeasible, iters);
        res.bad_rows.push_back(leave);
        return true;
      }

      SparseVec col;
      src_.column(enter, col);
      VectorXd w = ftran_sparse(col);
      if (std::abs(w(leave)) < kPivotTolLoose) {
        refactor();
        w = ftran_sparse(col);
        if (std::abs(w(leave)) < kPivotTolLoose) {
          res = finish(SolveStatus::iteration_limit, iters);
          res.warm_start_failed = true;
          return true;
        }
      }
      const double theta = xB_(leave) / w(leave);
      xB_.noalias() -= theta * w;
      xB_(leave) = theta;
      if (basis_[leave] < art0()) is_basic_[basis_[leave]] = 0;
      is_basic_[enter] = 1;
      basis_[leave] = enter;
      etas_r_.push_back(leave);
      etas_w_.push_back(std::move(w));
      ++iters;
      if (int(etas_r_.size()) >= kEtaLimit) refactor();
    }
    dual_iters_ = iters;
    return false;
  }

  bool tie_break(int r, int cur) const
  {
    const bool ra = basis_[r] >= art0(), ca = basis_[cur] >= art0();
    if (ra != ca) return ra;  // prefer kicking artificials out
    return basis_[r] < basis_[cur];
  }

  void refactor()
  {
    MatrixXd B = MatrixXd::Zero(m_, m_);
    SparseVec tmp;
    for (int r = 0; r < m_; ++r) {
      const int j = basis_[r];
      if (j >= art0()) {
        B(j - art0(), r) = 1.0;
      } else {
        src_.column(j, tmp);
        for (const auto& [k, v] : tmp) B(k, r) = v;
      }
    }
    lu_.compute(B);
    etas_r_.clear();
    etas_w_.clear();
    xB_ = lu_.solve(b_);
  }

  VectorXd ftran_sparse(const SparseVec& col) const
  {
    VectorXd v = VectorXd::Zero(m_);
    for (const auto& [k, val] : col) v(k) = val;
    return ftran(std::move(v));
  }

  VectorXd ftran(VectorXd v) const
  {
    v = lu_.solve(v);
    for (std::size_t k = 0; k < etas_r_.size(); ++k) {
      const int r = etas_r_[k];
      const VectorXd& w = etas_w_[k];
      const double t = v(r) / w(r);
      if (t != 0.0) {
        v.noalias() -= w * t;
      }
      v(r) = t;
    }
    return v;
  }

  VectorXd btran(VectorXd v) const
  {
    for (std::size_t k = etas_r_.size(); k-- > 0;) {
      const int r = etas_r_[k];
      const VectorXd& w = etas_w_[k];
      const double s = w.dot(v);
      v(r) = (v(r) - (s - w(r) * v(r))) / w(r);
    }
    return lu_.transpose().solve(v);
  }

  void drive_out_artificials()
  {
    std::vector<double> buf;
    SparseVec col;
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < art0()) continue;
      VectorXd e = VectorXd::Zero(m_);
      e(r) = 1.0;
      const VectorXd rho = btran(std::move(e));
      src_.dots(rho, buf);
      for (int j = 0; j < ncols_; ++j) {
        if (is_basic_[j] || std::abs(buf[j]) <= kPivotTol) continue;
        src_.column(j, col);
        VectorXd w = ftran_sparse(col);
        if (std::abs(w(r)) <= kPivotTol) continue;
        xB_(r) = 0.0;
        is_basic_[j] = 1;
        basis_[r] = j;
        etas_r_.push_back(r);
        etas_w_.push_back(std::move(w));
        if (int(etas_r_.size()) >= kEtaLimit) refactor();
        break;
      }
      // No pivot found: the row is linearly dependent; the artificial stays
      // basic at zero and can never become nonzero.
    }
  }

  EngineResult finish(SolveStatus status, long iter)
  {
    // Fresh factorization before extraction keeps the solution tight.
    refactor();
    EngineResult res;
    res.status = status;
    res.iterations = iter;
    res.x.assign(ncols_, 0.0);
    for (int r = 0; r < m_; ++r)
      if (basis_[r] < art0()) res.x[basis_[r]] = xB_(r);
    VectorXd cB(m_);
    const int saved_phase = phase_;
    phase_ = 2;
    for (int r = 0; r < m_; ++r) cB(r) = phase_cost(basis_[r]);
    phase_ = saved_phase;
    res.pi = btran(cB);
    res.basis = basis_;
    double obj = 0.0;
    for (int j = 0; j < ncols_; ++j)
      if (res.x[j] != 0.0) obj += src_.cost(j) * res.x[j];
    res.objective = obj;
    return res;
  }

  const ColumnSource& src_;
  VectorXd b_;
  int m_;
  int ncols_;
  SolveOptions opts_;
  long max_iters_ = 0;
  bool has_artificials_ = false;
  bool start_dual_ = false;
  long dual_iters_ = 0;
  int phase_ = 2;

  std::vector<int> basis_;
  std::vector<char> is_basic_;
  Eigen::PartialPivLU<MatrixXd> lu_;
  std::vector<int> etas_r_;
  std::vector<VectorXd> etas_w_;
  VectorXd xB_;
  std::vector<double> devex_;
};

// ---------------------------------------------------------------------------
// Generic path.

struct DirectResult {
  EngineResult eng;
  std::vector<double> x;         // structural solution
  std::vector<double> row_duals; // per input row, original sign convention
};

double cost_of(const GenericLP& lp, int i)
{
  return lp.costs.empty() ? 1.0 : lp.costs[i];
}

// Standard-form direct solve; basis dimension equals the row count.
DirectResult solve_direct(const GenericLP& lp, const SolveOptions& opts)
{
  const int n = lp.n_vars;
  const int m = int(lp.rows.size());
  std::vector<char> flip(m, 0);
  ExplicitSource src;
  src.m = m;
  src.cols.resize(n + m);
  src.costs.assign(n + m, 0.0);
  for (int j = 0; j < n; ++j) src.costs[j] = cost_of(lp, j);
  VectorXd b(m);
  std::vector<int> init_basis(m, -1);
  for (int r = 0; r < m; ++r) {
    const auto& row = lp.rows[r];
    const bool neg = row.rhs < 0.0;
    flip[r] = neg;
    const double sgn = neg ? -1.0 : 1.0;
    b(r) = sgn * row.rhs;
    for (const auto& [k, v] : row.entries) src.cols[k].emplace_back(r, sgn * v);
    RowSense sense = row.sense;
    if (neg) sense = sense == RowSense::ge ? RowSense::le : RowSense::ge;
    if (sense == RowSense::le) {
      src.cols[n + r].emplace_back(r, 1.0);
      init_basis[r] = n + r;  // slack basis
    } else {
      src.cols[n + r].emplace_back(r, -1.0);  // surplus, needs artificial
    }
  }

  SimplexEngine engine(src, std::move(b), std::move(init_basis), opts);
  DirectResult out;
  out.eng = engine.run();
  out.x.assign(out.eng.x.begin(), out.eng.x.begin() + n);
  out.row_duals.resize(m);
  if (out.eng.pi.size() == m)
    for (int r = 0; r < m; ++r)
      out.row_duals[r] = (flip[r] ? -1.0 : 1.0) * out.eng.pi(r);
  return out;
}

double residual_of(const GenericLP& lp, const std::vector<double>& x)
{
  double res = 0.0;
  for (const auto& row : lp.rows) {
    double acc = 0.0;
    for (const auto& [k, v] : row.entries) acc += v * x[k];
    const double viol =
        row.sense == RowSense::ge ? row.rhs - acc : acc - row.rhs;
    res = std::max(res, viol);
  }
  for (double v : x) res = std::max(res, -v);
  return res;
}

// Dual of the generic LP, solved when rows outnumber variables.
SolveResult solve_via_dual(const GenericLP& lp, const SolveOptions& opts)
{
  const int n = lp.n_vars;
  const int m = int(lp.rows.size());
  GenericLP dual;
  dual.n_vars = m;
  dual.costs.resize(m);
  dual.rows.resize(n);
  for (int i = 0; i < n; ++i) {
    dual.rows[i].sense = RowSense::le;
    dual.rows[i].rhs = cost_of(lp, i);
  }
  for (int r = 0; r < m; ++r) {
    const auto& row = lp.rows[r];
    const double sgn = row.sense == RowSense::ge ? 1.0 : -1.0;
    dual.costs[r] = -sgn * row.rhs;
    for (const auto& [k, v] : row.entries)
      dual.rows[k].entries.emplace_back(r, sgn * v);
  }

  DirectResult d = solve_direct(dual, opts);
  SolveResult res;
  res.iterations = d.eng.iterations;
  switch (d.eng.status) {
    case SolveStatus::optimal: {
      res.status = SolveStatus::optimal;
      res.alpha.resize(n);
      for (int i = 0; i < n; ++i) res.alpha[i] = -d.row_duals[i];
      res.row_duals.resize(m);
      for (int r = 0; r < m; ++r)
        res.row_duals[r] =
            lp.rows[r].sense == RowSense::ge ? d.x[r] : -d.x[r];
      double obj = 0.0;
      for (int i = 0; i < n; ++i) obj += cost_of(lp, i) * res.alpha[i];
      res.objective = obj;
      res.max_residual = residual_of(lp, res.alpha);
      break;
    }
    case SolveStatus::unbounded: {
      res.status = SolveStatus::infeasible;  // Farkas certificate
      for (const auto& [col, wgt] : d.eng.ray)
        if (col < m && std::abs(wgt) > 1e-9) res.infeasible_rows.push_back(col);
      std::sort(res.infeasible_rows.begin(), res.infeasible_rows.end());
      break;
    }
    case SolveStatus::infeasible:
      res.status = SolveStatus::unbounded;
      break;
    case SolveStatus::iteration_limit:
      res.status = SolveStatus::iteration_limit;
      break;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Frontier path: structured dual columns priced group-wise.

// Positions (into CoverGroup::points) of the per-group upper convex hull of
// (d, Y).  Dropped points are convex combinations dominated by kept ones, so
// their rows are implied: pruning is exact.
std::vector<int> upper_hull_points(const std::vector<CoverGroup::Point>& pts)
{
  // points arrive sorted by extended index, hence by d
  std::vector<int> dedup;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (!dedup.empty() && pts[dedup.back()].d == pts[k].d) {
      if (pts[k].rhs > pts[dedup.back()].rhs) dedup.back() = int(k);
    } else {
      dedup.push_back(int(k));
    }
  }
  std::vector<int> hull;
  for (int idx : dedup) {
    while (hull.size() >= 2) {
      const auto& a = pts[hull[hull.size() - 2]];
      const auto& b = pts[hull[hull.size() - 1]];
      const auto& c = pts[idx];
      const double cross =
          (b.d - a.d) * (c.rhs - a.rhs) - (b.rhs - a.rhs) * (c.d - a.d);
      if (cross >= 0.0)
        hull.pop_back();  // b lies on or below chord a-c: implied
      else
        break;
    }
    hull.push_back(idx);
  }
  return hull;
}

class FrontierDualSource : public ColumnSource {
 public:
  FrontierDualSource(const FrontierLP& lp, double curvature_rhs)
      : lp_(lp), curvature_rhs_(curvature_rhs)
  {
    // The number of curvature row pairs can exceed n_vars when the LP has
    // been restricted to a column subset (all rows kept).
    ncurv_ = int(lp.curvature.size());
    hull_.resize(lp.cover.size());
    group_row_prefix_.resize(lp.cover.size());
    std::size_t prefix = 0;
    for (std::size_t g = 0; g < lp.cover.size(); ++g) {
      group_row_prefix_[g] = prefix;
      prefix += lp.cover[g].points.size();
      hull_[g] = upper_hull_points(lp.cover[g].points);
      for (int p : hull_[g]) cover_col_.emplace_back(int(g), p);
    }
    n_cover_ = int(cover_col_.size());
    off_curv_plus_ = n_cover_;
    off_curv_minus_ = off_curv_plus_ + ncurv_;
    off_bin_ = off_curv_minus_ + ncurv_;
    off_slack_ = off_bin_ + int(lp.bins.size());
    total_ = off_slack_ + lp.n_vars;
  }

  int num_cols() const override { return total_; }

  double cost(int j) const override
  {
    if (j < n_cover_) {
      const auto& [g, p] = cover_col_[j];
      return -lp_.cover[g].points[p].rhs;
    }
    if (j < off_bin_) return curvature_rhs_;
    if (j < off_slack_) return lp_.bin_rhs;
    return 0.0;
  }

  void column(int j, SparseVec& out) const override
  {
    out.clear();
    if (j < n_cover_) {
      const auto& [g, p] = cover_col_[j];
      const auto& grp = lp_.cover[g];
      const double d = grp.points[p].d;
      // merge u + d*v over the shared (sorted) index range
      std::size_t a = 0, b = 0;
      while (a < grp.u.size() || b < grp.v.size()) {
        const int ka = a < grp.u.size() ? grp.u[a].first : INT32_MAX;
        const int kb = b < grp.v.size() ? grp.v[b].first : INT32_MAX;
        if (ka < kb) {
          out.emplace_back(ka, grp.u[a].second);
          ++a;
        } else if (kb < ka) {
          out.emplace_back(kb, d * grp.v[b].second);
          ++b;
        } else {
          out.emplace_back(ka, grp.u[a].second + d * grp.v[b].second);
          ++a;
          ++b;
        }
      }
      return;
    }
    if (j < off_curv_minus_) {
      for (const auto& [k, v] : lp_.curvature[j - off_curv_plus_])
        out.emplace_back(k, -v);
      return;
    }
    if (j < off_bin_) {
      out = lp_.curvature[j - off_curv_minus_];
      return;
    }
    if (j < off_slack_) {
      for (int idx : lp_.bins[j - off_bin_]) out.emplace_back(idx, -1.0);
      return;
    }
    out.emplace_back(j - off_slack_, 1.0);
  }

  void dots(const VectorXd& pi, std::vector<double>& out) const override
  {
    out.assign(total_, 0.0);
    int j = 0;
    for (std::size_t g = 0; g < lp_.cover.size(); ++g) {
      const auto& grp = lp_.cover[g];
      double pu = 0.0, pv = 0.0;
      for (const auto& [k, v] : grp.u) pu += pi(k) * v;
      for (const auto& [k, v] : grp.v) pv += pi(k) * v;
      for (int p : hull_[g]) out[j++] = pu + grp.points[p].d * pv;
    }
    for (int i = 0; i < ncurv_; ++i) {
      double pw = 0.0;
      for (const auto& [k, v] : lp_.curvature[i]) pw += pi(k) * v;
      out[off_curv_plus_ + i] = -pw;
      out[off_curv_minus_ + i] = pw;
    }
    for (std::size_t mth = 0; mth < lp_.bins.size(); ++mth) {
      double s = 0.0;
      for (int idx : lp_.bins[mth]) s += pi(idx);
      out[off_bin_ + int(mth)] = -s;
    }
    for (int i = 0; i < lp_.n_vars; ++i) out[off_slack_ + i] = pi(i);
  }

  // Maps a dual column to the row index in FrontierLP::rows() order.
  int column_to_row(int j) const
  {
    if (j < n_cover_) {
      const auto& [g, p] = cover_col_[j];
      return int(group_row_prefix_[g]) + p;
    }
    if (j < off_bin_) return int(lp_.meta.n_cover_rows) + (j - off_curv_plus_);
    if (j < off_slack_)
      return int(lp_.meta.n_cover_rows) + 2 * ncurv_ + (j - off_bin_);
    return -1;  // slack
  }

  int n_cover() const { return n_cover_; }
  int off_curv_plus() const { return off_curv_plus_; }
  int off_curv_minus() const { return off_curv_minus_; }
  int off_bin() const { return off_bin_; }
  int off_slack() const { return off_slack_; }
  const std::pair<int, int>& cover_col(int j) const { return cover_col_[j]; }

 private:
  const FrontierLP& lp_;
  double curvature_rhs_;
  int ncurv_ = 0;
  std::vector<std::vector<int>> hull_;
  std::vector<std::size_t> group_row_prefix_;
  std::vector<std::pair<int, int>> cover_col_;
  int n_cover_ = 0, off_curv_plus_ = 0, off_curv_minus_ = 0, off_bin_ = 0,
      off_slack_ = 0, total_ = 0;
};

// Nonzero dual multipliers of the rows active at a frontier optimum,
// keyed by the (full-problem) group/bin structure.
struct ActiveRows {
  std::vector<std::tuple<int, double, double>> cover;  // (group, d, z)
  std::vector<std::pair<int, double>> curv;  // (group, signed z: + for the
                                             // upper, - for the lower bound)
  std::vector<double> bin_z;                 // per bin
};

}  // namespace

SolveResult solve(const GenericLP& lp, const SolveOptions& opts)
{
  if (lp.n_vars <= 0) throw std::invalid_argument("LP has no variables");
  if (!lp.costs.empty() && int(lp.costs.size()) != lp.n_vars)
    throw std::invalid_argument("cost vector length mismatch");
  for (const auto& row : lp.rows)
    for (const auto& [k, v] : row.entries)
      if (k < 0 || k >= lp.n_vars)
        throw std::invalid_argument("row entry index out of range");

  if (int(lp.rows.size()) > lp.n_vars) return solve_via_dual(lp, opts);

  DirectResult d = solve_direct(lp, opts);
  SolveResult res;
  res.status = d.eng.status;
  res.iterations = d.eng.iterations;
  if (res.status == SolveStatus::optimal) {
    res.alpha = d.x;
    double obj = 0.0;
    for (int i = 0; i < lp.n_vars; ++i) obj += cost_of(lp, i) * res.alpha[i];
    res.objective = obj;
    res.row_duals = d.row_duals;
    res.max_residual = residual_of(lp, res.alpha);
  } else if (res.status == SolveStatus::infeasible) {
    res.infeasible_rows = d.eng.bad_rows;
  }
  return res;
}

namespace {

// A basis carried between column-generation rounds, keyed by sample id so it
// survives reindexing of the restricted variable set.  Each entry maps a
// sample (dual row) to its basic column: a nonnegative value is a structural
// dual column index (stable across rounds because every row is retained), a
// negative value -(k+1) is the slack of sample k.
using CarriedBasis = std::vector<std::pair<int, long long>>;

SolveResult solve_frontier_direct(const FrontierLP& lp,
                                  const SolveOptions& opts, ActiveRows* act,
                                  const std::vector<int>* keep = nullptr,
                                  CarriedBasis* warm = nullptr)
{
  FrontierDualSource src(lp, lp.curvature_rhs);
  const VectorXd b = VectorXd::Ones(lp.n_vars);
  std::vector<int> init_basis(lp.n_vars);
  const int off_slack = src.off_slack();
  for (int i = 0; i < lp.n_vars; ++i) init_basis[i] = off_slack + i;

  // Translate the carried basis onto the current variable set.  The result
  // is dual feasible (new rows contribute nothing to old reduced costs), so
  // a short dual-simplex run repairs the newly negative slack rows.
  bool warm_applied = false;
  if (keep && warm && !warm->empty()) {
    auto row_of = [&](int sample) {
      const auto it = std::lower_bound(keep->begin(), keep->end(), sample);
      return it != keep->end() && *it == sample ? int(it - keep->begin()) : -1;
    };
    std::vector<char> used(src.num_cols(), 0), covered(lp.n_vars, 0);
    std::vector<int> wb(lp.n_vars, -1);
    bool ok = true;
    for (const auto& [sample, enc] : *warm) {
      const int r = row_of(sample);
      int col = -1;
      if (enc >= 0) {
        col = int(enc);
      } else {
        const int r2 = row_of(int(-enc - 1));
        if (r2 >= 0) col = off_slack + r2;
      }
      if (r < 0 || col < 0 || col >= src.num_cols() || used[col]) {
        ok = false;
        break;
      }
      used[col] = 1;
      covered[r] = 1;
      wb[r] = col;
    }
    for (int i = 0; ok && i < lp.n_vars; ++i)
      if (!covered[i]) {
        if (used[off_slack + i]) ok = false;
        wb[i] = off_slack + i;
      }
    if (ok) {
      init_basis = std::move(wb);
      warm_applied = true;
    }
  }

  SimplexEngine engine(src, b, init_basis, opts);
  engine.set_start_dual(warm_applied);
  EngineResult eng = engine.run();
  if (warm_applied &&
      (eng.warm_start_failed || eng.status == SolveStatus::iteration_limit)) {
    // Stalled repair: redo the round cold from the slack basis.
    std::vector<int> slack_basis(lp.n_vars);
    for (int i = 0; i < lp.n_vars; ++i) slack_basis[i] = off_slack + i;
    SimplexEngine cold(src, b, std::move(slack_basis), opts);
    const long spent = eng.iterations;
    eng = cold.run();
    eng.iterations += spent;
  }

  SolveResult res;
  res.iterations = eng.iterations;
  switch (eng.status) {
    case SolveStatus::optimal: {
      res.status = SolveStatus::optimal;
      res.alpha.resize(lp.n_vars);
      double obj = 0.0;
      for (int i = 0; i < lp.n_vars; ++i) {
        res.alpha[i] = -eng.pi(i);
        obj += res.alpha[i];
      }
      res.objective = obj;
      const auto rep = validate_solution(lp, res.alpha, opts.tol_feas);
      res.max_residual = std::max({rep.max_cover_violation,
                                   rep.max_curvature_violation,
                                   rep.max_bin_violation, -rep.min_alpha});
      if (keep && warm && int(eng.basis.size()) == lp.n_vars) {
        warm->clear();
        for (int r = 0; r < lp.n_vars; ++r) {
          const int col = eng.basis[r];
          if (col >= src.num_cols()) {  // artificial: don't carry this basis
            warm->clear();
            break;
          }
          const long long enc =
              col >= off_slack
                  ? -(static_cast<long long>((*keep)[col - off_slack]) + 1)
                  : static_cast<long long>(col);
          warm->emplace_back((*keep)[r], enc);
        }
      }
      if (act) {
        act->bin_z.assign(lp.bins.size(), 0.0);
        for (int j = 0; j < src.off_slack(); ++j) {
          const double z = eng.x[j];
          if (z <= 1e-14) continue;
          if (j < src.n_cover()) {
            const auto& [g, p] = src.cover_col(j);
            act->cover.emplace_back(g, lp.cover[g].points[p].d, z);
          } else if (j < src.off_curv_minus()) {
            act->curv.emplace_back(j - src.off_curv_plus(), z);
          } else if (j < src.off_bin()) {
            act->curv.emplace_back(j - src.off_curv_minus(), -z);
          } else {
            act->bin_z[j - src.off_bin()] = z;
          }
        }
      }
      break;
    }
    case SolveStatus::unbounded: {
      res.status = SolveStatus::infeasible;
      for (const auto& [col, wgt] : eng.ray) {
        const int row = src.column_to_row(col);
        if (row >= 0 && std::abs(wgt) > 1e-9) res.infeasible_rows.push_back(row);
      }
      std::sort(res.infeasible_rows.begin(), res.infeasible_rows.end());
      break;
    }
    case SolveStatus::infeasible:
      // The dual starts from a feasible slack basis; its infeasibility
      // would mean the primal is unbounded, which sum(alpha) >= 0 forbids.
      throw std::logic_error("frontier LP reported unbounded objective");
    case SolveStatus::iteration_limit:
      res.status = SolveStatus::iteration_limit;
      break;
  }
  return res;
}

// The LP with its variable set restricted to the sorted index list keep;
// every row is retained (entries filtered and reindexed).
FrontierLP restrict_columns(const FrontierLP& lp, const std::vector<int>& keep)
{
  std::vector<int> local(lp.n_vars, -1);
  for (int idx = 0; idx < int(keep.size()); ++idx) local[keep[idx]] = idx;

  FrontierLP r;
  r.n_vars = int(keep.size());
  r.xs.reserve(keep.size());
  r.ys.reserve(keep.size());
  for (int k : keep) {
    r.xs.push_back(lp.xs[k]);
    r.ys.push_back(lp.ys[k]);
  }
  r.bandwidth = lp.bandwidth;
  r.kernel = lp.kernel;
  r.curvature_rhs = lp.curvature_rhs;
  r.bin_rhs = lp.bin_rhs;
  r.meta = lp.meta;

  auto filter = [&](const SparseVec& in) {
    SparseVec out;
    for (const auto& [k, v] : in)
      if (local[k] >= 0) out.emplace_back(local[k], v);
    return out;
  };
  r.cover.resize(lp.cover.size());
  for (std::size_t g = 0; g < lp.cover.size(); ++g) {
    r.cover[g].i = lp.cover[g].i;
    r.cover[g].u = filter(lp.cover[g].u);
    r.cover[g].v = filter(lp.cover[g].v);
    r.cover[g].points = lp.cover[g].points;
  }
  r.curvature.resize(lp.curvature.size());
  for (std::size_t i = 0; i < lp.curvature.size(); ++i)
    r.curvature[i] = filter(lp.curvature[i]);
  r.bins.resize(lp.bins.size());
  for (std::size_t m = 0; m < lp.bins.size(); ++m)
    for (int k : lp.bins[m])
      if (local[k] >= 0) r.bins[m].push_back(local[k]);
  return r;
}

}  // namespace

// Primal column generation: the optimum is carried by few coefficients, so
// solve over a growing active set of kernel centers and price the excluded
// columns against the (sparse) row duals until none can improve.
SolveResult solve(const FrontierLP& lp, const SolveOptions& opts)
{
  const int n = lp.n_vars;
  // FRONTIER_LP_DIRECT forces the one-shot solve at any size (testing knob).
  if (n <= 256 || std::getenv("FRONTIER_LP_DIRECT"))
    return solve_frontier_direct(lp, opts, nullptr);

  const double h = lp.bandwidth.h;
  std::vector<char> in_set(n, 0);
  int stride = std::max(1, int(n * h / 8.0));
  auto seed_every = [&](int s) {
    for (int i = 0; i < n; i += s) in_set[i] = 1;
  };
  seed_every(stride);
  for (const auto& bin : lp.bins) {  // the top observation of every bin
    int top = -1;
    for (int k : bin)
      if (top < 0 || lp.ys[k] > lp.ys[top]) top = k;
    if (top >= 0) in_set[top] = 1;
  }

  long total_iters = 0;
  CarriedBasis warm;
  for (int round = 0; round < 60; ++round) {
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
      if (in_set[i]) keep.push_back(i);
    if (int(keep.size()) == n) {
      SolveResult r = solve_frontier_direct(lp, opts, nullptr);
      r.iterations += total_iters;
      return r;
    }

    const FrontierLP rlp = restrict_columns(lp, keep);
    ActiveRows act;
    SolveResult r = solve_frontier_direct(rlp, opts, &act, &keep, &warm);
    total_iters += r.iterations;
    if (std::getenv("FRONTIER_LP_DEBUG"))
      std::fprintf(stderr, "colgen round %d: |A|=%zu iters=%ld status=%d\n",
                   round, keep.size(), r.iterations, int(r.status));
    if (r.status == SolveStatus::infeasible) {
      // restricted set too thin to cover every row: densify and retry
      stride = std::max(1, stride / 2);
      seed_every(stride);
      if (stride == 1) seed_every(1);
      continue;
    }
    if (r.status != SolveStatus::optimal) {
      r.iterations = total_iters;
      return r;
    }

    // Price the excluded columns: rc_k = 1 - sum_cover z (K + d K') +
    // sum_curv (+-z) K'' + z_bin.  Only active rows contribute.  Admit at
    // most kMaxAdd per round (the most negative first) so the working set
    // tracks the optimal support instead of overshooting it.
    constexpr int kMaxAdd = 96;
    std::vector<std::pair<double, int>> cand;
    for (int k = 0; k < n; ++k) {
      if (in_set[k]) continue;
      const double xk = lp.xs[k];
      double rc = 1.0, scale = 1.0;
      for (const auto& [g, d, z] : act.cover) {
        const double a = lp.kernel.eval_periodic(lp.bandwidth, lp.xs[g], xk, 0) +
                         d * lp.kernel.eval_periodic(lp.bandwidth, lp.xs[g], xk, 1);
        rc -= z * a;
        scale += std::abs(z * a);
      }
      for (const auto& [i, zs] : act.curv) {
        const double a = lp.kernel.eval_periodic(lp.bandwidth, lp.xs[i], xk, 2);
        rc += zs * a;
        scale += std::abs(zs * a);
      }
      int bin = int(std::floor(xk * lp.meta.m_h));
      if (bin >= lp.meta.m_h) bin = lp.meta.m_h - 1;
      rc += act.bin_z[bin];
      if (rc < -1e-8 * scale) cand.emplace_back(rc / scale, k);
    }
    if (int(cand.size()) > kMaxAdd) {
      std::nth_element(cand.begin(), cand.begin() + kMaxAdd, cand.end());
      cand.resize(kMaxAdd);
    }
    for (const auto& [score, k] : cand) in_set[k] = 1;
    if (cand.empty()) {
      std::vector<double> alpha(n, 0.0);
      for (int idx = 0; idx < int(keep.size()); ++idx)
        alpha[keep[idx]] = r.alpha[idx];
      r.alpha = std::move(alpha);
      r.iterations = total_iters;
      return r;
    }
  }
  // pathological churn: fall back to the full problem
  SolveResult r = solve_frontier_direct(lp, opts, nullptr);
  r.iterations += total_iters;
  return r;
}

SolveResult solve_with_relaxation(const FrontierLP& lp,
                                  const SolveOptions& opts, double schedule,
                                  int max_steps)
{
  SolveResult res = solve(lp, opts);
  res.relaxation_level = 0;
  if (res.status != SolveStatus::infeasible) return res;

  // A zero cap (l_beta = 0, e.g. a constant frontier) cannot be loosened by
  // scaling; seed it at the unit-constant schedule value instead.
  const double h3 = std::pow(lp.bandwidth.h, 3.0);
  const double zero_seed =
      2.0 * lp.kernel.sup_constants().K2_max *
      std::max(std::log(double(std::max(lp.n_vars, 2))), 1.0) /
      (std::max(lp.n_vars, 2) * h3);

  FrontierLP relaxed = lp;
  for (int level = 1; level <= max_steps; ++level) {
    relaxed.curvature_rhs =
        relaxed.curvature_rhs > 0.0 ? relaxed.curvature_rhs * schedule
                                    : zero_seed;
    relaxed.meta.second_deriv_bound = relaxed.curvature_rhs;
    SolveResult r = solve(relaxed, opts);
    r.relaxation_level = level;
    if (r.status != SolveStatus::infeasible) return r;
    res = std::move(r);
  }
  return res;  // infeasible at every level; diagnostics from the last try
}

}  // namespace frontlp
