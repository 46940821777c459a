#pragma once

#include <optional>
#include <span>
#include <string>

#include "sparsedyn/types.hpp"

namespace sparsedyn {

enum class DiffMethod { CentralDiff, LocalPoly };
enum class Quadrature { Trapezoid, Simpson, LocalPolyIntegral };

struct EstimatorSpec {
  DiffMethod method = DiffMethod::LocalPoly;
  int degree = 8;
  int window = 17;
  Quadrature quadrature = Quadrature::LocalPolyIntegral;

  void validate() const;
};

DiffMethod diff_method_from_string(const std::string& name);
Quadrature quadrature_from_string(const std::string& name);
std::string to_string(DiffMethod method);
std::string to_string(Quadrature quadrature);

// Row-wise derivative of order 1 or 2 of samples Y (d x m) on grid t.
Matrix estimate_derivative(const Matrix& Y, std::span<const double> t, int deriv_order, const EstimatorSpec& spec);

// Cumulative integrals: column j is the integral of each feature row from
// t_1 to t_{j+1}; n x (m - 1).
Matrix build_gamma(const Matrix& features, std::span<const double> t, const EstimatorSpec& spec);

// Column j is values(:, j + 1) - values(:, 0).
Matrix delta(const Matrix& values);

// delta Y for order 1; for order 2 the differences of velocities, taken from
// W when given, otherwise estimated from Y with `spec`.
Matrix build_delta_targets(const Matrix& Y, std::span<const double> t, int order,
                           const std::optional<Matrix>& W = std::nullopt,
                           const std::optional<EstimatorSpec>& spec = std::nullopt);

}  // namespace sparsedyn
