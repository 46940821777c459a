#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sparsedyn/constraints.hpp"
#include "sparsedyn/problem.hpp"
#include "sparsedyn/types.hpp"

namespace sparsedyn {

struct LmoResult {
  Matrix vertex;
  bool zero_gradient = false;
};

// Vertex of the weighted l1 ball minimizing <Omega, G>.
LmoResult lmo_closed_form(const Matrix& G, const Polytope& polytope);
// Same problem as a linear program, honoring the general constraints.
LmoResult lmo_lp(const Matrix& G, const Polytope& polytope);
// Dispatches on polytope.strategy().
LmoResult lmo(const Matrix& G, const Polytope& polytope);

// Euclidean projection onto the probability simplex.
Vector project_simplex(const Vector& v);

struct SimplexResult {
  Vector weights;
  double gap = 0.0;  // simplex Frank-Wolfe gap at `weights`
  std::size_t iterations = 0;
  bool reached = false;
};

// Minimizes lambda^T Q lambda - 2 c^T lambda over the simplex by accelerated
// projected gradient until the simplex Frank-Wolfe gap is <= gap_target.
SimplexResult apgd_simplex(const Matrix& Q, const Vector& c, const Vector& lambda0, double gap_target,
                           std::size_t max_iterations);
// ||Lambda lambda - b||^2 form.
SimplexResult apgd_simplex_ls(const Matrix& Lambda, const Vector& b, const Vector& lambda0, double gap_target,
                              std::size_t max_iterations);

struct IterationRecord {
  double objective = 0.0;
  double gap = 0.0;
  std::size_t vertices = 0;
  double seconds = 0.0;
};

struct SolveReport {
  std::string solver;
  Matrix omega;  // in the problem's (normalized) feature units
  std::size_t iterations = 0;
  double fw_gap = 0.0;
  bool converged = false;
  std::size_t vertex_count = 0;
  std::size_t clipped_steps = 0;
  std::vector<std::size_t> clipped_iterations;
  std::vector<IterationRecord> trace;
  double seconds = 0.0;
  double hyperparameter = 0.0;  // alpha, threshold, or lambda
  std::vector<std::string> warnings;
};

using IterateCallback = std::function<void(std::size_t iteration, const Matrix& omega)>;

struct SolverOptions {
  std::size_t max_iterations = 20000;
  double gap_tolerance = 1e-6;
  double subproblem_tolerance = 1e-9;  // FCCG correction accuracy
  std::size_t subproblem_max_iterations = 20000;
  IterateCallback on_iterate;
};

// Frank-Wolfe gap <Omega - V, grad f(Omega)> for the polytope's LMO.
double frank_wolfe_gap(const RegressionProblem& p, const Polytope& polytope, const Matrix& omega);

SolveReport cg_solve(const RegressionProblem& p, const Polytope& polytope, const Matrix& omega1,
                     const SolverOptions& options = {});
SolveReport fccg_solve(const RegressionProblem& p, const Polytope& polytope, const Matrix& omega1,
                       const SolverOptions& options = {});
SolveReport bcg_solve(const RegressionProblem& p, const Polytope& polytope, const Matrix& omega0,
                      const SolverOptions& options = {});
// Starting from the zero matrix.
SolveReport bcg_solve(const RegressionProblem& p, const Polytope& polytope, const SolverOptions& options = {});

struct StlsqOptions {
  std::size_t max_rounds = 200;
  // Optional starting support (n x d, nonzero = active).
  std::optional<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>> support;
};

SolveReport stlsq_solve(const RegressionProblem& p, double threshold, const StlsqOptions& options = {});

struct FistaOptions {
  double tolerance = 1e-8;  // per-iteration objective decrease
  // The decrease test only stops once the subgradient residual is also below
  // this value; a small decrease alone can occur far from the optimum.
  double kkt_tolerance = 1e-6;
  std::size_t max_iterations = 100000;
};

// min ||B - Omega^T A||^2 + lambda ||Omega||_{1,1}.
SolveReport fista_solve(const RegressionProblem& p, double lambda, const FistaOptions& options = {});

// max over entries of the subgradient optimality residual of the penalized
// objective.
double lasso_kkt_residual(const RegressionProblem& p, const Matrix& omega, double lambda);

}  // namespace sparsedyn
