#include <doctest.h>

#include <cmath>
#include <random>

#include "sparsedyn/dictionary.hpp"
#include "sparsedyn/dynamics.hpp"
#include "sparsedyn/errors.hpp"
#include "sparsedyn/estimation.hpp"

using namespace sparsedyn;

namespace {

Matrix row_of(const std::vector<double>& t, double (*f)(double)) {
  Matrix Y(1, static_cast<Eigen::Index>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) Y(0, static_cast<Eigen::Index>(i)) = f(t[i]);
  return Y;
}

EstimatorSpec central() {
  EstimatorSpec s;
  s.method = DiffMethod::CentralDiff;
  return s;
}

EstimatorSpec with_quadrature(Quadrature q) {
  EstimatorSpec s;
  s.quadrature = q;
  return s;
}

}  // namespace

TEST_SUITE("estimation") {
  TEST_CASE("linear signals have constant derivative") {
    const auto t = linspace(0.0, 2.0, 41);
    Matrix Y = row_of(t, [](double x) { return 3.5 * x - 1.0; });
    for (const EstimatorSpec& s : {central(), EstimatorSpec{}}) {
      Matrix d = estimate_derivative(Y, t, 1, s);
      CHECK((d.array() - 3.5).abs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("second derivative of t^2") {
    const auto t = linspace(0.0, 1.0, 30);
    Matrix Y = row_of(t, [](double x) { return x * x; });
    for (int degree : {2, 4, 8}) {
      EstimatorSpec s;
      s.degree = degree;
      s.window = 2 * degree + 1;
      Matrix d = estimate_derivative(Y, t, 2, s);
      CHECK((d.array() - 2.0).abs().maxCoeff() < 1e-8);
    }
    Matrix c = estimate_derivative(Y, t, 2, central());
    CHECK((c.array() - 2.0).abs().maxCoeff() < 1e-8);
  }

  TEST_CASE("central differences on sin are second-order accurate") {
    std::vector<double> t;
    for (int i = 0; i <= 1000; ++i) t.push_back(0.01 * i);
    Matrix Y = row_of(t, [](double x) { return std::sin(x); });
    Matrix d = estimate_derivative(Y, t, 1, central());
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(d(0, Eigen::Index(i)) - std::cos(t[i])));
    CHECK(worst <= 2e-5);
  }

  TEST_CASE("local polynomials differentiate polynomials of their degree exactly") {
    const auto t = linspace(0.0, 1.0, 30);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    Vector coef(9);
    for (int k = 0; k < 9; ++k) coef(k) = normal(rng);
    Matrix Y(1, 30), dY(1, 30), ddY(1, 30);
    for (Eigen::Index i = 0; i < 30; ++i) {
      double x = t[static_cast<std::size_t>(i)], v = 0, dv = 0, ddv = 0;
      for (int k = 0; k < 9; ++k) {
        v += coef(k) * std::pow(x, k);
        if (k >= 1) dv += k * coef(k) * std::pow(x, k - 1);
        if (k >= 2) ddv += k * (k - 1) * coef(k) * std::pow(x, k - 2);
      }
      Y(0, i) = v;
      dY(0, i) = dv;
      ddY(0, i) = ddv;
    }
    EstimatorSpec s;
    CHECK((estimate_derivative(Y, t, 1, s) - dY).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((estimate_derivative(Y, t, 2, s) - ddY).cwiseAbs().maxCoeff() < 1e-7);
  }

  TEST_CASE("window larger than the experiment is an input error") {
    const auto t = linspace(0.0, 1.0, 10);
    Matrix Y = Matrix::Zero(1, 10);
    CHECK_THROWS_AS(estimate_derivative(Y, t, 1, EstimatorSpec{}), InputError);
    CHECK_THROWS_AS(build_gamma(Y, t, EstimatorSpec{}), InputError);
    EstimatorSpec bad;
    bad.window = 5;
    CHECK_THROWS_AS(estimate_derivative(Matrix::Zero(1, 30), linspace(0.0, 1.0, 30), 1, bad), InputError);
  }

  TEST_CASE("integral of a constant feature is elapsed time") {
    const auto t = linspace(0.5, 3.0, 26);
    Matrix F = Matrix::Ones(1, 26);
    for (Quadrature q : {Quadrature::Trapezoid, Quadrature::Simpson, Quadrature::LocalPolyIntegral}) {
      Matrix g = build_gamma(F, t, with_quadrature(q));
      REQUIRE(g.cols() == 25);
      for (Eigen::Index j = 0; j < 25; ++j) CHECK(std::abs(g(0, j) - (t[std::size_t(j + 1)] - t[0])) < 1e-12);
    }
    Matrix g = build_gamma(F, t, with_quadrature(Quadrature::Trapezoid));
    for (Eigen::Index j = 0; j < 25; ++j) CHECK(g(0, j) == (t[std::size_t(j + 1)] - t[0]));
  }

  TEST_CASE("quadrature exactness") {
    for (std::size_t m : {25u, 26u}) {
      const auto t = linspace(0.0, 2.0, m);
      Matrix lin = row_of(t, [](double x) { return x; });
      Matrix g = build_gamma(lin, t, with_quadrature(Quadrature::Trapezoid));
      for (std::size_t j = 0; j + 1 < m; ++j) {
        CHECK(std::abs(g(0, Eigen::Index(j)) - 0.5 * t[j + 1] * t[j + 1]) < 1e-14);
      }
      Matrix sq = row_of(t, [](double x) { return x * x; });
      g = build_gamma(sq, t, with_quadrature(Quadrature::Simpson));
      for (std::size_t j = 0; j + 1 < m; ++j) {
        // last panel of an even sample count falls back to the trapezoid
        if (m % 2 == 0 && j + 2 == m) continue;
        CHECK(std::abs(g(0, Eigen::Index(j)) - t[j + 1] * t[j + 1] * t[j + 1] / 3) < 1e-12);
      }
      Matrix p8 = row_of(t, [](double x) { return std::pow(x, 8) - 3 * x * x; });
      g = build_gamma(p8, t, with_quadrature(Quadrature::LocalPolyIntegral));
      for (std::size_t j = 0; j + 1 < m; ++j) {
        const double x = t[j + 1];
        CHECK(std::abs(g(0, Eigen::Index(j)) - (std::pow(x, 9) / 9 - x * x * x)) < 1e-9);
      }
    }
  }

  TEST_CASE("trapezoid integrals of positive features are increasing") {
    const auto t = linspace(0.0, 5.0, 60);
    Matrix F = row_of(t, [](double x) { return 1.1 + std::sin(3 * x); });
    Matrix g = build_gamma(F, t, with_quadrature(Quadrature::Trapezoid));
    for (Eigen::Index j = 1; j < g.cols(); ++j) CHECK(g(0, j) > g(0, j - 1));
  }

  TEST_CASE("delta targets") {
    Matrix Y(1, 3);
    Y << 1, 3, 6;
    Matrix d = delta(Y);
    REQUIRE(d.cols() == 2);
    CHECK(d(0, 0) == 2);
    CHECK(d(0, 1) == 5);
    CHECK(delta(Matrix::Constant(2, 5, 4.0)).isZero(0.0));
    const auto t = linspace(0.0, 1.0, 3);
    CHECK_THROWS_AS(build_delta_targets(Y, t, 2), InputError);
    Matrix W(1, 3);
    W << 0, 1, 4;
    CHECK(build_delta_targets(Y, t, 2, W)(0, 1) == 4);
    CHECK(build_delta_targets(Y, t, 1)(0, 1) == 5);
  }

  TEST_CASE("second-order integral identity on clean FPUT data") {
    ModelSpec f = fput_model(2, 0.7);
    Dataset ds = generate_experiments(f, 3, 90, 1.0, 4);
    Dictionary dict = monomial_dictionary(2, 3);
    Matrix xi = true_coefficients(f, dict);
    for (const auto& e : ds.experiments) {
      Matrix lhs = build_delta_targets(e.Y, e.t, 2, e.V);
      Matrix rhs_int = xi.transpose() * build_gamma(dict.evaluate(e.X), e.t, EstimatorSpec{});
      CHECK((lhs - rhs_int).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }
}
