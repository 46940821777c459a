#include "sparsedyn/problem.hpp"

#include <algorithm>
#include <cmath>

#include "sparsedyn/errors.hpp"

namespace sparsedyn {
namespace {

Matrix exact_derivative(const ModelSpec& model, const Experiment& ex) {
  Matrix out(model.dim, ex.X.cols());
  for (Eigen::Index j = 0; j < ex.X.cols(); ++j) {
    out.col(j) = model.order() == 1 ? rhs(model, Vector(ex.X.col(j)))
                                    : rhs(model, Vector(ex.X.col(j)), Vector(ex.V.col(j)));
  }
  return out;
}

Matrix targets_for(const Dataset& data, const Experiment& ex, const ProblemOptions& opt) {
  const int order = data.model.order();
  const auto& est = opt.estimator;
  if (opt.formulation == Formulation::Differential) {
    if (opt.targets == TargetSource::Exact) return exact_derivative(data.model, ex);
    if (order == 2 && opt.targets == TargetSource::ObservedVelocity) return estimate_derivative(ex.W, ex.t, 1, est);
    return estimate_derivative(ex.Y, ex.t, order, est);
  }
  if (order == 1) return delta(opt.targets == TargetSource::Exact ? ex.X : ex.Y);
  switch (opt.targets) {
    case TargetSource::Exact:
      return delta(ex.V);
    case TargetSource::ObservedVelocity:
      return build_delta_targets(ex.Y, ex.t, 2, ex.W);
    case TargetSource::Estimated:
      break;
  }
  return build_delta_targets(ex.Y, ex.t, 2, std::nullopt, est);
}

}  // namespace

std::string to_string(Formulation f) { return f == Formulation::Differential ? "differential" : "integral"; }

Formulation formulation_from_string(const std::string& name) {
  if (name == "differential") return Formulation::Differential;
  if (name == "integral") return Formulation::Integral;
  throw InputError("unknown formulation: " + name);
}

RegressionProblem::RegressionProblem(Matrix A, Matrix B, Formulation formulation, int ode_order, RowScales scales)
    : A_(std::move(A)),
      B_(std::move(B)),
      formulation_(formulation),
      ode_order_(ode_order),
      scales_(std::move(scales)) {
  if (A_.cols() != B_.cols()) throw InputError("problem: feature and target column counts differ");
  if (A_.rows() == 0 || B_.rows() == 0) throw InputError("problem: empty feature or target matrix");
  if (scales_.scales.size() != A_.rows()) throw InputError("problem: scale vector length mismatch");
  if (!A_.allFinite() || !B_.allFinite()) throw InputError("problem: non-finite entries");
  gram_ = A_ * A_.transpose();
  cross_ = A_ * B_.transpose();
  target_norm_sq_ = B_.squaredNorm();
}

RegressionProblem::RegressionProblem(Matrix A, Matrix B)
    : RegressionProblem(A, std::move(B), Formulation::Differential, 1, RowScales{Vector::Ones(A.rows())}) {}

RegressionProblem RegressionProblem::with_radius(double alpha) const {
  if (!(alpha >= 0) || !std::isfinite(alpha)) throw InputError("problem: radius must be finite and nonnegative");
  RegressionProblem copy = *this;
  copy.radius_ = alpha;
  return copy;
}

FeatureTargets assemble_blocks(const Dataset& data, const std::vector<std::size_t>& experiments,
                               const Dictionary& dict, const ProblemOptions& options) {
  if (experiments.empty()) throw InputError("problem: no experiments selected");
  if (dict.dim() != data.model.dim) throw InputError("problem: dictionary dimension mismatch");
  std::vector<Matrix> As, Bs;
  Eigen::Index cols = 0;
  for (std::size_t idx : experiments) {
    if (idx >= data.experiments.size()) throw InputError("problem: experiment index out of range");
    const Experiment& ex = data.experiments[idx];
    Matrix psi = dict.evaluate(ex.Y);
    Matrix A = options.formulation == Formulation::Differential ? psi : build_gamma(psi, ex.t, options.estimator);
    Matrix B = targets_for(data, ex, options);
    cols += A.cols();
    As.push_back(std::move(A));
    Bs.push_back(std::move(B));
  }
  FeatureTargets out{Matrix(dict.size(), cols), Matrix(data.model.dim, cols)};
  Eigen::Index at = 0;
  for (std::size_t k = 0; k < As.size(); ++k) {
    out.A.middleCols(at, As[k].cols()) = As[k];
    out.B.middleCols(at, Bs[k].cols()) = Bs[k];
    at += As[k].cols();
  }
  return out;
}

RegressionProblem build_problem(const Dataset& data, const Dictionary& dict, const ProblemOptions& options) {
  std::vector<std::size_t> all(data.experiments.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return build_problem(data, all, dict, options);
}

RegressionProblem build_problem(const Dataset& data, const std::vector<std::size_t>& experiments,
                                const Dictionary& dict, const ProblemOptions& options) {
  FeatureTargets ft = assemble_blocks(data, experiments, dict, options);
  RowScales scales = options.normalize ? compute_row_scales(ft.A) : RowScales{Vector::Ones(ft.A.rows())};
  Matrix A = options.normalize ? apply_row_scales(ft.A, scales) : std::move(ft.A);
  RegressionProblem p(std::move(A), std::move(ft.B), options.formulation, data.model.order(), std::move(scales));
  return p.with_radius(default_radius(p));
}

double objective(const RegressionProblem& p, const Matrix& omega) {
  if (omega.rows() != p.features() || omega.cols() != p.outputs()) throw InputError("objective: shape mismatch");
  return (p.B() - omega.transpose() * p.A()).squaredNorm();
}

double objective_gram(const RegressionProblem& p, const Matrix& omega) {
  return p.target_norm_sq() + (omega.cwiseProduct(p.gram() * omega - 2 * p.cross())).sum();
}

Matrix gradient(const RegressionProblem& p, const Matrix& omega) {
  if (omega.rows() != p.features() || omega.cols() != p.outputs()) throw InputError("gradient: shape mismatch");
  return 2 * (p.gram() * omega - p.cross());
}

Matrix least_squares(const Matrix& A, const Matrix& B) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A.transpose());
  cod.setThreshold(1e-10);
  return cod.solve(B.transpose());
}

double default_radius(const RegressionProblem& p) {
  if (p.A().isZero(0.0)) throw DegenerateProblemError("default radius: feature matrix is all zeros");
  const Matrix ls = least_squares(p.A(), p.B());
  const double alpha = 2 * ls.cwiseAbs().sum();
  if (!(alpha > 0)) throw DegenerateProblemError("default radius: least-squares solution is zero");
  return alpha;
}

LineSearch exact_linesearch(const RegressionProblem& p, const Matrix& omega, const Matrix& direction) {
  return exact_linesearch(p, omega, direction, gradient(p, omega));
}

LineSearch exact_linesearch(const RegressionProblem& p, const Matrix&, const Matrix& direction, const Matrix& grad) {
  LineSearch ls;
  const double curvature = direction.cwiseProduct(p.gram() * direction).sum();
  if (!(curvature > 0)) {
    ls.null_direction = true;
    return ls;
  }
  const double raw = -0.5 * direction.cwiseProduct(grad).sum() / curvature;
  ls.clipped = raw > 1.0;
  ls.step = std::clamp(raw, 0.0, 1.0);
  return ls;
}

}  // namespace sparsedyn
