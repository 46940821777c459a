#include "sparsedyn/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "dop853_tableau.hpp"
#include "sparsedyn/errors.hpp"

namespace sparsedyn {
namespace {

namespace tab = detail::dop853;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kErrorExponent = -1.0 / 8.0;

double rms(const Vector& v) { return v.size() == 0 ? 0.0 : v.norm() / std::sqrt(double(v.size())); }

double initial_step(const OdeRhs& f, double t0, const Vector& y0, const Vector& f0,
                    double tol, double span) {
  Vector scale = (tol + y0.array().abs() * tol).matrix();
  double d0 = rms((y0.array() / scale.array()).matrix());
  double d1 = rms((f0.array() / scale.array()).matrix());
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  Vector y1 = y0 + h0 * f0;
  Vector f1(y0.size());
  f(t0 + h0, y1, f1);
  double d2 = rms(((f1 - f0).array() / scale.array()).matrix()) / h0;
  double h1;
  if (d1 <= 1e-15 && d2 <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
  }
  return std::min({100 * h0, h1, span});
}

}  // namespace

OdeSolution integrate_ode_partial(const OdeRhs& f, const Vector& y0,
                                  std::span<const double> t_grid,
                                  const OdeOptions& options) {
  if (t_grid.empty()) throw InputError("integrate: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw InputError("integrate: time grid must be strictly increasing");
  }
  if (!(options.tol > 0)) throw InputError("integrate: tolerance must be positive");

  const Eigen::Index n = y0.size();
  const double tol = options.tol;
  OdeSolution sol;
  sol.states.resize(n, static_cast<Eigen::Index>(t_grid.size()));
  sol.states.col(0) = y0;
  sol.completed = 1;
  if (t_grid.size() == 1) return sol;

  std::array<Vector, tab::kStages + 1> K;
  for (auto& k : K) k.resize(n);
  Vector y = y0, y_new(n), stage(n), err5(n), err3(n), scale(n);

  double t = t_grid.front();
  f(t, y, K[0]);
  double h = initial_step(f, t, y, K[0], tol, t_grid.back() - t);
  bool previous_rejected = false;

  for (std::size_t g = 1; g < t_grid.size(); ++g) {
    const double target = t_grid[g];
    while (t < target) {
      if (sol.steps + sol.rejected >= options.max_steps) {
        sol.failure_time = t;
        sol.states.conservativeResize(n, static_cast<Eigen::Index>(sol.completed));
        return sol;
      }
      const double min_step = 10 * std::abs(std::nextafter(t, std::numeric_limits<double>::infinity()) - t);
      if (h < min_step) {
        sol.failure_time = t;
        sol.states.conservativeResize(n, static_cast<Eigen::Index>(sol.completed));
        return sol;
      }
      bool hits_target = false;
      double step = h;
      if (t + step >= target || target - (t + step) < min_step) {
        step = target - t;
        hits_target = true;
      }

      for (int s = 1; s < tab::kStages; ++s) {
        stage = y;
        for (int j = 0; j < s; ++j) {
          if (tab::kA[s][j] != 0.0) stage.noalias() += (step * tab::kA[s][j]) * K[j];
        }
        f(t + tab::kC[s] * step, stage, K[s]);
      }
      y_new = y;
      for (int s = 0; s < tab::kStages; ++s) {
        if (tab::kB[s] != 0.0) y_new.noalias() += (step * tab::kB[s]) * K[s];
      }
      const double t_new = hits_target ? target : t + step;
      f(t_new, y_new, K[tab::kStages]);

      scale = (tol + y.array().abs().max(y_new.array().abs()) * tol).matrix();
      err5.setZero();
      err3.setZero();
      for (int s = 0; s <= tab::kStages; ++s) {
        err5.noalias() += tab::kE5[s] * K[s];
        err3.noalias() += tab::kE3[s] * K[s];
      }
      const double e5 = (err5.array() / scale.array()).matrix().squaredNorm();
      const double e3 = (err3.array() / scale.array()).matrix().squaredNorm();
      double error_norm = 0.0;
      if (e5 > 0.0 || e3 > 0.0) {
        error_norm = std::abs(step) * e5 / std::sqrt((e5 + 0.01 * e3) * double(n));
      }
      const bool finite = std::isfinite(error_norm) && y_new.allFinite();

      if (finite && error_norm < 1.0) {
        double factor = error_norm == 0.0 ? kMaxFactor
                                          : std::min(kMaxFactor, kSafety * std::pow(error_norm, kErrorExponent));
        if (previous_rejected) factor = std::min(1.0, factor);
        h = step * factor;
        previous_rejected = false;
        t = t_new;
        y = y_new;
        K[0] = K[tab::kStages];
        ++sol.steps;
      } else {
        const double factor = finite ? std::max(kMinFactor, kSafety * std::pow(error_norm, kErrorExponent))
                                     : kMinFactor;
        h = step * factor;
        previous_rejected = true;
        ++sol.rejected;
      }
    }
    sol.states.col(static_cast<Eigen::Index>(g)) = y;
    sol.completed = g + 1;
  }
  return sol;
}

Matrix integrate_ode(const OdeRhs& f, const Vector& y0, std::span<const double> t_grid,
                     const OdeOptions& options) {
  OdeSolution sol = integrate_ode_partial(f, y0, t_grid, options);
  if (sol.failure_time) {
    throw IntegrationError("integration failed: step size underflow or non-finite state", *sol.failure_time);
  }
  return std::move(sol.states);
}

}  // namespace sparsedyn
