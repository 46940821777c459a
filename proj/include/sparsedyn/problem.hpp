#pragma once

#include <span>
#include <string>
#include <vector>

#include "sparsedyn/dictionary.hpp"
#include "sparsedyn/dynamics.hpp"
#include "sparsedyn/estimation.hpp"
#include "sparsedyn/types.hpp"

namespace sparsedyn {

enum class Formulation { Differential, Integral };

std::string to_string(Formulation f);
Formulation formulation_from_string(const std::string& name);

// Where regression targets come from. Estimated uses only the noisy samples.
// ObservedVelocity uses the noisy velocities W for second-order integral
// targets. Exact uses clean states and the model itself.
enum class TargetSource { Estimated, ObservedVelocity, Exact };

struct ProblemOptions {
  Formulation formulation = Formulation::Integral;
  EstimatorSpec estimator;
  TargetSource targets = TargetSource::Estimated;
  bool normalize = true;
};

// min ||B - Omega^T A||_F^2 over an l1 ball of radius alpha. A is n x M
// (normalized rows unless built raw), B is d x M.
class RegressionProblem {
 public:
  RegressionProblem(Matrix A, Matrix B, Formulation formulation, int ode_order, RowScales scales);
  // Raw matrices with unit scales.
  RegressionProblem(Matrix A, Matrix B);

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  Formulation formulation() const { return formulation_; }
  int ode_order() const { return ode_order_; }
  const RowScales& scales() const { return scales_; }
  double radius() const { return radius_; }
  Eigen::Index features() const { return A_.rows(); }
  Eigen::Index outputs() const { return B_.rows(); }
  Eigen::Index samples() const { return A_.cols(); }

  // A A^T, A B^T and ||B||_F^2.
  const Matrix& gram() const { return gram_; }
  const Matrix& cross() const { return cross_; }
  double target_norm_sq() const { return target_norm_sq_; }

  RegressionProblem with_radius(double alpha) const;

 private:
  Matrix A_, B_;
  Formulation formulation_;
  int ode_order_;
  RowScales scales_;
  double radius_ = 0.0;
  Matrix gram_, cross_;
  double target_norm_sq_ = 0.0;
};

struct FeatureTargets {
  Matrix A;  // raw features
  Matrix B;
};

// Raw (unnormalized) feature/target blocks for the chosen experiments,
// concatenated column-wise.
FeatureTargets assemble_blocks(const Dataset& data, const std::vector<std::size_t>& experiments,
                               const Dictionary& dict, const ProblemOptions& options);

RegressionProblem build_problem(const Dataset& data, const Dictionary& dict, const ProblemOptions& options);
RegressionProblem build_problem(const Dataset& data, const std::vector<std::size_t>& experiments,
                                const Dictionary& dict, const ProblemOptions& options);

double objective(const RegressionProblem& p, const Matrix& omega);
// Same value computed from the cached Gram matrices.
double objective_gram(const RegressionProblem& p, const Matrix& omega);
// -2 A (B - Omega^T A)^T
Matrix gradient(const RegressionProblem& p, const Matrix& omega);

// 2 * ||Omega_ls||_{1,1} for the minimum-norm least-squares solution.
double default_radius(const RegressionProblem& p);
Matrix least_squares(const Matrix& A, const Matrix& B);

struct LineSearch {
  double step = 0.0;
  bool null_direction = false;
  bool clipped = false;  // unclamped step exceeded 1
};

// argmin over gamma in [0, 1] of f(Omega + gamma D).
LineSearch exact_linesearch(const RegressionProblem& p, const Matrix& omega, const Matrix& direction);
LineSearch exact_linesearch(const RegressionProblem& p, const Matrix& omega, const Matrix& direction,
                            const Matrix& grad);

}  // namespace sparsedyn
