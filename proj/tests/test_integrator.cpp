#include <doctest.h>

#include <cmath>
#include <vector>

#include "sparsedyn/dynamics.hpp"
#include "sparsedyn/errors.hpp"
#include "sparsedyn/integrator.hpp"

using namespace sparsedyn;

TEST_SUITE("integrator") {
  TEST_CASE("exponential decay matches the analytic value") {
    OdeRhs f = [](double, const Vector& y, Vector& dy) { dy = -y; };
    std::vector<double> grid{0.0, 1.0};
    Matrix out = integrate_ode(f, Vector::Ones(1), grid);
    CHECK(std::abs(out(0, 1) - 0.3678794412) < 1e-10);
    CHECK(std::abs(out(0, 1) - std::exp(-1.0)) < 1e-12);
  }

  TEST_CASE("uncoupled Kuramoto oscillator rotates at its natural frequency") {
    ModelSpec m = kuramoto_model(1, 0.0, 0.0, Vector::Ones(1));
    Trajectory tr = integrate_model(m, Vector::Zero(1), std::nullopt, {0.0, 2.0});
    CHECK(std::abs(tr.X(0, 1) - 2.0) < 1e-10);
  }

  TEST_CASE("grid samples are hit exactly and the first column is the initial state") {
    OdeRhs f = [](double t, const Vector&, Vector& dy) { dy(0) = std::cos(t); };
    std::vector<double> grid = linspace(0.0, 3.0, 31);
    Matrix out = integrate_ode(f, Vector::Constant(1, 0.5), grid);
    CHECK(out(0, 0) == 0.5);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(out(0, static_cast<Eigen::Index>(i)) - (0.5 + std::sin(grid[i]))) < 1e-12);
    }
  }

  TEST_CASE("observed convergence order is at least five") {
    // Harmonic oscillator over several periods; error against the exact
    // solution versus the number of accepted steps.
    OdeRhs f = [](double, const Vector& y, Vector& dy) {
      dy(0) = y(1);
      dy(1) = -y(0);
    };
    std::vector<double> grid{0.0, 20.0};
    Vector y0(2);
    y0 << 1.0, 0.0;
    std::vector<double> errs, steps;
    for (double tol : {1e-5, 1e-7, 1e-9}) {
      OdeOptions opt;
      opt.tol = tol;
      OdeSolution sol = integrate_ode_partial(f, y0, grid, opt);
      REQUIRE_FALSE(sol.failure_time.has_value());
      errs.push_back(std::hypot(sol.states(0, 1) - std::cos(20.0), sol.states(1, 1) + std::sin(20.0)));
      steps.push_back(static_cast<double>(sol.steps));
    }
    const double order = -(std::log(errs.back()) - std::log(errs.front())) /
                         (std::log(steps.back()) - std::log(steps.front()));
    CHECK(order >= 5.0);
  }

  TEST_CASE("finite-time blow-up reports the failure time") {
    OdeRhs f = [](double, const Vector& y, Vector& dy) { dy = y.cwiseProduct(y); };
    std::vector<double> grid{0.0, 0.5, 2.0};
    OdeSolution sol = integrate_ode_partial(f, Vector::Ones(1), grid, {1e-10});
    REQUIRE(sol.failure_time.has_value());
    CHECK(*sol.failure_time > 0.99);
    CHECK(*sol.failure_time <= 1.0 + 1e-6);
    CHECK(sol.completed == 2);
    CHECK(std::abs(sol.states(0, 1) - 2.0) < 1e-8);
    CHECK_THROWS_AS(integrate_ode(f, Vector::Ones(1), grid, {1e-10}), IntegrationError);
  }

  TEST_CASE("non-increasing grids are rejected") {
    OdeRhs f = [](double, const Vector& y, Vector& dy) { dy = y; };
    std::vector<double> grid{0.0, 1.0, 1.0};
    CHECK_THROWS_AS(integrate_ode(f, Vector::Ones(1), grid), InputError);
  }
}
