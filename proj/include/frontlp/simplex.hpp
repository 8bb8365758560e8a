#pragma once

#include <vector>

#include "frontlp/lp_model.hpp"

namespace frontlp {

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

struct SolveOptions {
  double tol_feas = 1e-8;  // absolute row-residual tolerance
  double tol_opt = 1e-9;   // reduced-cost tolerance
  long max_iters = 0;      // 0 = automatic (scales with basis size)
};

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<double> alpha;  // present iff optimal
  double objective = 0;
  long iterations = 0;
  double max_residual = 0;
  int relaxation_level = 0;
  // Dual values per input row (generic path only; sign follows row sense).
  std::vector<double> row_duals;
  // On infeasibility: indices (row order of the LP) implicated by the
  // phase-1 optimum or the Farkas certificate.
  std::vector<int> infeasible_rows;
};

// Generic solver for min costs'x subject to ConstraintRow senses and x >= 0.
// Empty costs means the all-ones objective.  Solves through the dual when
// the row count exceeds the variable count, so the basis never outgrows
// min(rows, vars).
SolveResult solve(const GenericLP& lp, const SolveOptions& opts = {});

// Frontier LP entry point; prices cover rows group-wise and prunes rows
// implied by the per-group upper hull (exact dominance, the optimum is
// unchanged).  The returned solution is validated against the full row set.
SolveResult solve(const FrontierLP& lp, const SolveOptions& opts = {});

// Retries an infeasible solve with the curvature bound multiplied by
// `schedule` up to max_steps times.  Cover and bin rows are never relaxed.
SolveResult solve_with_relaxation(const FrontierLP& lp,
                                  const SolveOptions& opts = {},
                                  double schedule = 2.0, int max_steps = 6);

}  // namespace frontlp
