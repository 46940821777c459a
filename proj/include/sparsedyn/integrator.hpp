#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

#include "sparsedyn/types.hpp"

namespace sparsedyn {

// Right-hand side of y' = f(t, y); writes f into dy (already sized).
using OdeRhs = std::function<void(double t, const Vector& y, Vector& dy)>;

struct OdeOptions {
  double tol = 1e-13;  // used as both absolute and relative tolerance
  std::size_t max_steps = 10'000'000;
};

struct OdeSolution {
  Matrix states;                       // dim x (number of completed grid points)
  std::size_t completed = 0;           // grid points reached, including t_grid[0]
  std::optional<double> failure_time;  // set when integration stopped early
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

// Adaptive Dormand-Prince 8(5,3) integration sampled on t_grid (strictly
// increasing, t_grid[0] is the initial time). Stops early on step-size
// underflow or a non-finite state and reports where.
OdeSolution integrate_ode_partial(const OdeRhs& f, const Vector& y0,
                                  std::span<const double> t_grid,
                                  const OdeOptions& options = {});

// As above, but throws IntegrationError unless the whole grid is reached.
Matrix integrate_ode(const OdeRhs& f, const Vector& y0,
                     std::span<const double> t_grid,
                     const OdeOptions& options = {});

}  // namespace sparsedyn
