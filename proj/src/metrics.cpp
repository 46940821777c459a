#include "sparsedyn/metrics.hpp"

#include <cmath>

#include "sparsedyn/errors.hpp"

namespace sparsedyn {
namespace {

void check_shapes(const Matrix& omega, const Matrix& xi) {
  if (omega.rows() != xi.rows() || omega.cols() != xi.cols()) throw InputError("metrics: coefficient shapes differ");
}

}  // namespace

double recovery_error(const Matrix& omega, const Matrix& xi) {
  check_shapes(omega, xi);
  return (omega - xi).norm();
}

double derivative_error(const Matrix& omega, const Matrix& xi, const std::vector<const Experiment*>& test,
                        const Dictionary& dict) {
  check_shapes(omega, xi);
  const Matrix diff = omega - xi;
  double sq = 0.0;
  for (const Experiment* ex : test) sq += (diff.transpose() * dict.evaluate(ex->Y)).squaredNorm();
  return std::sqrt(sq);
}

double trajectory_error(const Matrix& omega, const Matrix& xi, const std::vector<const Experiment*>& test,
                        const Dictionary& dict, const EstimatorSpec& quadrature) {
  check_shapes(omega, xi);
  const Matrix diff = omega - xi;
  double sq = 0.0;
  for (const Experiment* ex : test) {
    sq += (diff.transpose() * build_gamma(dict.evaluate(ex->Y), ex->t, quadrature)).squaredNorm();
  }
  return std::sqrt(sq);
}

SupportErrors support_errors(const Matrix& omega, const Matrix& xi, double zero_tol) {
  check_shapes(omega, xi);
  if (!(zero_tol >= 0)) throw InputError("support_errors: zero tolerance must be nonnegative");
  SupportErrors s;
  for (Eigen::Index c = 0; c < xi.cols(); ++c) {
    for (Eigen::Index r = 0; r < xi.rows(); ++r) {
      const bool present = std::abs(omega(r, c)) > zero_tol;
      if (present && xi(r, c) == 0.0) ++s.extraneous;
      if (!present && xi(r, c) != 0.0) ++s.missing;
    }
  }
  return s;
}

double baseline_zero_tolerance(const Matrix& omega) {
  return omega.size() == 0 ? 0.0 : 1e-8 * omega.cwiseAbs().maxCoeff();
}

MetricReport compute_metrics(const Matrix& omega, const Matrix& xi, const std::vector<const Experiment*>& test,
                             const Dictionary& dict, const EstimatorSpec& quadrature, double zero_tol, double eta) {
  MetricReport m;
  m.recovery = recovery_error(omega, xi);
  m.derivative = derivative_error(omega, xi, test, dict);
  m.trajectory = trajectory_error(omega, xi, test, dict, quadrature);
  m.support = support_errors(omega, xi, zero_tol);
  m.eta = eta;
  return m;
}

}  // namespace sparsedyn
