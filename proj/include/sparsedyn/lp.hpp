#pragma once

#include "sparsedyn/types.hpp"

namespace sparsedyn {

// min cost^T x  s.t.  eq_matrix x = eq_rhs,  le_matrix x <= le_rhs,  x >= 0.
struct LinearProgram {
  Vector cost;
  Matrix eq_matrix;
  Vector eq_rhs;
  Matrix le_matrix;
  Vector le_rhs;
};

struct LpSolution {
  Vector x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

// Dense two-phase tableau simplex with Bland's rule. Throws InfeasibleError
// when no feasible point exists and SolverError when unbounded.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace sparsedyn
