#pragma once

#include <cstddef>
#include <vector>

#include "sparsedyn/dictionary.hpp"
#include "sparsedyn/dynamics.hpp"
#include "sparsedyn/estimation.hpp"
#include "sparsedyn/types.hpp"

namespace sparsedyn {

struct SupportErrors {
  std::size_t extraneous = 0;  // S_E
  std::size_t missing = 0;     // S_M
};

struct MetricReport {
  double recovery = 0.0;    // E_R
  double derivative = 0.0;  // E_D
  double trajectory = 0.0;  // E_T
  SupportErrors support;
  double eta = 0.0;
};

double recovery_error(const Matrix& omega, const Matrix& xi);
// ||(Omega - Xi)^T Psi(Y)||_F over the given experiments, raw features.
double derivative_error(const Matrix& omega, const Matrix& xi, const std::vector<const Experiment*>& test,
                        const Dictionary& dict);
// Same with Gamma(Y) built per experiment.
double trajectory_error(const Matrix& omega, const Matrix& xi, const std::vector<const Experiment*>& test,
                        const Dictionary& dict, const EstimatorSpec& quadrature);
SupportErrors support_errors(const Matrix& omega, const Matrix& xi, double zero_tol);

// zero tolerance used for baselines: 1e-8 * max |Omega|.
double baseline_zero_tolerance(const Matrix& omega);

MetricReport compute_metrics(const Matrix& omega, const Matrix& xi, const std::vector<const Experiment*>& test,
                             const Dictionary& dict, const EstimatorSpec& quadrature, double zero_tol, double eta);

}  // namespace sparsedyn
