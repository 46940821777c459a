#include "sparsedyn/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "sparsedyn/errors.hpp"

namespace sparsedyn {
namespace {

void check_grid(std::span<const double> t, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(t.size()) != cols) throw InputError("estimation: time grid length does not match samples");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw InputError("estimation: time grid must be strictly increasing");
  }
}

double uniform_step(std::span<const double> t) {
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw InputError("central differences need a uniform grid");
    }
  }
  return h;
}

struct LocalFit {
  Eigen::Index start;
  double center;
  double half_width;
  Matrix solve;  // (degree+1) x window, maps samples to coefficients in u
};

// Least-squares polynomial in u = (t - center) / half_width over the window
// starting at `start`.
LocalFit local_fit(std::span<const double> t, Eigen::Index start, int window, int degree) {
  LocalFit fit;
  fit.start = start;
  const double a = t[static_cast<std::size_t>(start)];
  const double b = t[static_cast<std::size_t>(start + window - 1)];
  fit.center = 0.5 * (a + b);
  fit.half_width = 0.5 * (b - a);
  Matrix V(window, degree + 1);
  for (int r = 0; r < window; ++r) {
    const double u = (t[static_cast<std::size_t>(start + r)] - fit.center) / fit.half_width;
    double p = 1.0;
    for (int c = 0; c <= degree; ++c) {
      V(r, c) = p;
      p *= u;
    }
  }
  fit.solve = V.colPivHouseholderQr().solve(Matrix::Identity(window, window));
  return fit;
}

Eigen::Index clamp_start(Eigen::Index i, int window, Eigen::Index m) {
  return std::clamp<Eigen::Index>(i - window / 2, 0, m - window);
}

Matrix local_poly_derivative(const Matrix& Y, std::span<const double> t, int order, const EstimatorSpec& spec) {
  const Eigen::Index m = Y.cols();
  Matrix out(Y.rows(), m);
  for (Eigen::Index i = 0; i < m; ++i) {
    LocalFit fit = local_fit(t, clamp_start(i, spec.window, m), spec.window, spec.degree);
    const double u = (t[static_cast<std::size_t>(i)] - fit.center) / fit.half_width;
    // d^order/du^order of sum c_k u^k evaluated at u.
    Vector basis = Vector::Zero(spec.degree + 1);
    for (int k = order; k <= spec.degree; ++k) {
      double falling = 1.0;
      for (int j = 0; j < order; ++j) falling *= (k - j);
      basis(k) = falling * std::pow(u, k - order);
    }
    const Vector weights = fit.solve.transpose() * basis / std::pow(fit.half_width, order);
    out.col(i) = Y.middleCols(fit.start, spec.window) * weights;
  }
  return out;
}

Matrix central_difference(const Matrix& Y, std::span<const double> t, int order) {
  const Eigen::Index m = Y.cols();
  if (m < 4) throw InputError("central differences need at least four samples");
  const double h = uniform_step(t);
  Matrix out(Y.rows(), m);
  if (order == 1) {
    for (Eigen::Index i = 1; i + 1 < m; ++i) out.col(i) = (Y.col(i + 1) - Y.col(i - 1)) / (2 * h);
    out.col(0) = (-11 * Y.col(0) + 18 * Y.col(1) - 9 * Y.col(2) + 2 * Y.col(3)) / (6 * h);
    out.col(m - 1) = (11 * Y.col(m - 1) - 18 * Y.col(m - 2) + 9 * Y.col(m - 3) - 2 * Y.col(m - 4)) / (6 * h);
  } else {
    for (Eigen::Index i = 1; i + 1 < m; ++i) out.col(i) = (Y.col(i + 1) - 2 * Y.col(i) + Y.col(i - 1)) / (h * h);
    out.col(0) = (2 * Y.col(0) - 5 * Y.col(1) + 4 * Y.col(2) - Y.col(3)) / (h * h);
    out.col(m - 1) = (2 * Y.col(m - 1) - 5 * Y.col(m - 2) + 4 * Y.col(m - 3) - Y.col(m - 4)) / (h * h);
  }
  return out;
}

// Integral of each row over each interval [t_k, t_{k+1}]: n x (m - 1).
Matrix interval_integrals(const Matrix& F, std::span<const double> t, const EstimatorSpec& spec) {
  const Eigen::Index m = F.cols();
  Matrix inc(F.rows(), m - 1);
  switch (spec.quadrature) {
    case Quadrature::Trapezoid:
      for (Eigen::Index k = 0; k + 1 < m; ++k) {
        const double h = t[static_cast<std::size_t>(k + 1)] - t[static_cast<std::size_t>(k)];
        inc.col(k) = 0.5 * h * (F.col(k) + F.col(k + 1));
      }
      break;
    case Quadrature::Simpson: {
      // Panels over pairs of intervals; the cumulative value at an interior
      // point of a panel uses the quadratic through the panel's three nodes.
      Eigen::Index k = 0;
      for (; k + 2 < m; k += 2) {
        const double t0 = t[static_cast<std::size_t>(k)], t1 = t[static_cast<std::size_t>(k + 1)],
                     t2 = t[static_cast<std::size_t>(k + 2)];
        // Exact integrals of the interpolating quadratic over [t0,t1] and [t1,t2].
        auto weights = [](double a, double b, double x0, double x1, double x2) {
          auto integ = [&](double xi, double xj, double xk) {
            auto prim = [&](double x) {
              return (x * x * x / 3 - (xj + xk) * x * x / 2 + xj * xk * x) / ((xi - xj) * (xi - xk));
            };
            return prim(b) - prim(a);
          };
          return Eigen::Vector3d(integ(x0, x1, x2), integ(x1, x0, x2), integ(x2, x0, x1));
        };
        const Eigen::Vector3d w0 = weights(t0 - t1, 0.0, t0 - t1, 0.0, t2 - t1);
        const Eigen::Vector3d w1 = weights(0.0, t2 - t1, t0 - t1, 0.0, t2 - t1);
        inc.col(k) = F.middleCols(k, 3) * w0;
        inc.col(k + 1) = F.middleCols(k, 3) * w1;
      }
      if (k + 1 < m) {
        const double h = t[static_cast<std::size_t>(k + 1)] - t[static_cast<std::size_t>(k)];
        inc.col(k) = 0.5 * h * (F.col(k) + F.col(k + 1));
      }
      break;
    }
    case Quadrature::LocalPolyIntegral:
      if (m < spec.window) throw InputError("estimation: window larger than the number of samples");
      for (Eigen::Index k = 0; k + 1 < m; ++k) {
        const Eigen::Index start = std::clamp<Eigen::Index>(k - spec.window / 2 + 1, 0, m - spec.window);
        LocalFit fit = local_fit(t, start, spec.window, spec.degree);
        const double ua = (t[static_cast<std::size_t>(k)] - fit.center) / fit.half_width;
        const double ub = (t[static_cast<std::size_t>(k + 1)] - fit.center) / fit.half_width;
        Vector basis(spec.degree + 1);
        double pa = ua, pb = ub;
        for (int r = 0; r <= spec.degree; ++r) {
          basis(r) = (pb - pa) / (r + 1);
          pa *= ua;
          pb *= ub;
        }
        const Vector weights = fit.solve.transpose() * basis * fit.half_width;
        inc.col(k) = F.middleCols(start, spec.window) * weights;
      }
      break;
  }
  return inc;
}

}  // namespace

void EstimatorSpec::validate() const {
  if (degree < 1) throw InputError("estimator degree must be at least 1");
  if (method == DiffMethod::LocalPoly || quadrature == Quadrature::LocalPolyIntegral) {
    if (window <= degree) throw InputError("estimator window must exceed the polynomial degree");
  }
}

DiffMethod diff_method_from_string(const std::string& name) {
  if (name == "central" || name == "centraldiff") return DiffMethod::CentralDiff;
  if (name == "localpoly") return DiffMethod::LocalPoly;
  throw InputError("unknown derivative method: " + name);
}

Quadrature quadrature_from_string(const std::string& name) {
  if (name == "trapezoid") return Quadrature::Trapezoid;
  if (name == "simpson") return Quadrature::Simpson;
  if (name == "localpoly") return Quadrature::LocalPolyIntegral;
  throw InputError("unknown quadrature: " + name);
}

std::string to_string(DiffMethod method) { return method == DiffMethod::CentralDiff ? "central" : "localpoly"; }

std::string to_string(Quadrature q) {
  switch (q) {
    case Quadrature::Trapezoid:
      return "trapezoid";
    case Quadrature::Simpson:
      return "simpson";
    case Quadrature::LocalPolyIntegral:
      return "localpoly";
  }
  return "unknown";
}

Matrix estimate_derivative(const Matrix& Y, std::span<const double> t, int deriv_order, const EstimatorSpec& spec) {
  spec.validate();
  if (deriv_order != 1 && deriv_order != 2) throw InputError("derivative order must be 1 or 2");
  check_grid(t, Y.cols());
  if (spec.method == DiffMethod::CentralDiff) return central_difference(Y, t, deriv_order);
  if (spec.window > Y.cols()) throw InputError("estimation: window larger than the number of samples");
  if (spec.degree < deriv_order) throw InputError("estimation: degree below derivative order");
  return local_poly_derivative(Y, t, deriv_order, spec);
}

Matrix build_gamma(const Matrix& features, std::span<const double> t, const EstimatorSpec& spec) {
  spec.validate();
  check_grid(t, features.cols());
  if (features.cols() < 2) throw InputError("integral features need at least two samples");
  Matrix inc = interval_integrals(features, t, spec);
  for (Eigen::Index k = 1; k < inc.cols(); ++k) inc.col(k) += inc.col(k - 1);
  return inc;
}

Matrix delta(const Matrix& values) {
  if (values.cols() < 2) throw InputError("delta: need at least two samples");
  return values.rightCols(values.cols() - 1).colwise() - values.col(0);
}

Matrix build_delta_targets(const Matrix& Y, std::span<const double> t, int order, const std::optional<Matrix>& W,
                           const std::optional<EstimatorSpec>& spec) {
  if (order == 1) return delta(Y);
  if (order != 2) throw InputError("delta targets: order must be 1 or 2");
  if (W && W->size() > 0) {
    if (W->rows() != Y.rows() || W->cols() != Y.cols()) throw InputError("delta targets: velocity shape mismatch");
    return delta(*W);
  }
  if (!spec) throw InputError("delta targets: order 2 needs velocities or a derivative estimator");
  return delta(estimate_derivative(Y, t, 1, *spec));
}

}  // namespace sparsedyn
