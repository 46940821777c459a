#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "sparsedyn/constraints.hpp"
#include "sparsedyn/dynamics.hpp"
#include "sparsedyn/errors.hpp"

using namespace sparsedyn;

namespace {

bool has_pair(const std::vector<TieGroup>& ties, TieMember a, TieMember b) {
  for (const auto& g : ties) {
    bool fa = false, fb = false;
    for (const auto& m : g.members) {
      fa = fa || (m.row == a.row && m.col == a.col);
      fb = fb || (m.row == b.row && m.col == b.col);
    }
    if (fa && fb) return true;
  }
  return false;
}

double tie_violation(const std::vector<TieGroup>& ties, const Matrix& xi) {
  double worst = 0.0;
  for (const auto& g : ties) {
    const auto& f = g.members.front();
    for (const auto& m : g.members) {
      worst = std::max(worst, std::abs(m.sign * xi(m.row, m.col) - f.sign * xi(f.row, f.col)));
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE("constraints") {
  TEST_CASE("Kuramoto symmetry families") {
    Dictionary d2 = trig_pairwise_dictionary(2);
    auto ties = kuramoto_symmetry(d2, 2);
    CHECK(has_pair(ties, {*d2.find("sin(x_1)"), 1, 1}, {*d2.find("sin(x_2)"), 0, 1}));
    CHECK(has_pair(ties, {*d2.find("sin(x_1)*cos(x_2)"), 1, 1}, {*d2.find("sin(x_2)*cos(x_1)"), 0, 1}));
    CHECK(has_pair(ties, {*d2.find("cos(x_1)"), 0, 1}, {*d2.find("cos(x_2)"), 0, 1}));
    CHECK(kuramoto_symmetry(trig_pairwise_dictionary(1), 1).empty());

    for (int d : {2, 3, 5}) {
      Dictionary dict = trig_pairwise_dictionary(d);
      Polytope poly = build_polytope(1.0, dict.size(), d, kuramoto_symmetry(dict, d));
      CHECK(poly.reduced_size() < dict.size() * d);
    }
    CHECK_THROWS_AS(kuramoto_symmetry(monomial_dictionary(2, 3), 2), ConstraintError);
  }

  TEST_CASE("FPUT neighbour symmetry") {
    Dictionary d2 = monomial_dictionary(2, 3);
    auto ties = fput_symmetry(d2, 2);
    CHECK(has_pair(ties, {*d2.find("x_1*x_2^2"), 1, 1}, {*d2.find("x_1^2*x_2"), 0, 1}));
    CHECK(fput_symmetry(monomial_dictionary(1, 3), 1).empty());
    CHECK_THROWS_AS(fput_symmetry(monomial_dictionary(2, 2), 2), ConstraintError);
  }

  TEST_CASE("true dynamics satisfy the generated constraints") {
    for (int d : {2, 3, 5}) {
      Dictionary trig = trig_pairwise_dictionary(d);
      CHECK(tie_violation(kuramoto_symmetry(trig, d), true_coefficients(kuramoto_model(d, 2.0, 0.2, std::uint64_t(d)), trig)) <=
            1e-12);
      Dictionary mono = monomial_dictionary(d, 3);
      CHECK(tie_violation(fput_symmetry(mono, d), true_coefficients(fput_model(d, 0.7), mono)) <= 1e-12);
    }
    Dictionary sm = monomial_dictionary(2, 1);
    CHECK(tie_violation(spring_mass_symmetry(sm), true_coefficients(spring_mass_model(1.5, 1.0, 2.0, 3.0), sm)) <= 1e-12);

    Dictionary mm = monomial_dictionary(4, 2);
    auto cons = mm_conservation(mm);
    CHECK(cons.size() == 30);
    Matrix xi = true_coefficients(michaelis_menten_model(0.01, 1.0, 1.0), mm);
    Polytope poly = build_polytope(xi.cwiseAbs().sum(), mm.size(), 4, {}, cons);
    CHECK(poly.violation(xi) <= 1e-12);
    CHECK(poly.violation(Matrix::Zero(15, 4)) == 0.0);
    CHECK(poly.strategy() == LmoStrategy::LinearProgram);
  }

  TEST_CASE("polytope weights and strategy") {
    Polytope plain = build_polytope(2.0, 3, 2, {});
    CHECK(plain.reduced_size() == 6);
    CHECK((plain.weights().array() == 1.0).all());
    CHECK(plain.strategy() == LmoStrategy::ClosedForm);

    Polytope tied = build_polytope(2.0, 3, 2, {TieGroup{{{0, 0, 1}, {1, 1, 1}}}});
    CHECK(tied.reduced_size() == 5);
    CHECK(tied.weights()(tied.variable_of(0, 0)) == 2.0);
    CHECK(tied.variable_of(0, 0) == tied.variable_of(1, 1));
  }

  TEST_CASE("overlapping ties merge and contradictions are rejected") {
    Polytope merged = build_polytope(1.0, 2, 2, {TieGroup{{{0, 0, 1}, {1, 0, 1}}}, TieGroup{{{1, 0, 1}, {0, 1, -1}}}});
    CHECK(merged.reduced_size() == 2);
    CHECK(merged.weights()(merged.variable_of(0, 0)) == 3.0);
    CHECK(merged.sign_of(0, 1) == -merged.sign_of(0, 0));

    std::vector<TieGroup> bad{TieGroup{{{0, 0, 1}, {1, 0, 1}}}, TieGroup{{{0, 0, 1}, {1, 0, -1}}}};
    CHECK_THROWS_AS(build_polytope(1.0, 2, 1, bad), ConstraintError);
    CHECK_THROWS_AS(build_polytope(1.0, 2, 1, {TieGroup{{{0, 0, 1}, {0, 0, 1}}}}), ConstraintError);
  }

  TEST_CASE("expansion honours ties and the weighted norm") {
    Dictionary dict = trig_pairwise_dictionary(3);
    Polytope poly = build_polytope(1.0, dict.size(), 3, kuramoto_symmetry(dict, 3));
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
      Vector z = testing::random_matrix(rng, poly.reduced_size(), 1);
      Matrix omega = poly.expand(z);
      CHECK(tie_violation(poly.ties(), omega) == 0.0);
      CHECK(omega.cwiseAbs().sum() == doctest::Approx(poly.weights().dot(z.cwiseAbs())).epsilon(1e-12));
      CHECK((poly.reduce(omega) - z).cwiseAbs().maxCoeff() == 0.0);
      Matrix G = testing::random_matrix(rng, dict.size(), 3);
      CHECK(G.cwiseProduct(omega).sum() == doctest::Approx(poly.reduce_gradient(G).dot(z)).epsilon(1e-12));
    }
  }

  TEST_CASE("conservation band") {
    Matrix psi = Matrix::Ones(3, 4);
    Vector a = Vector::Ones(2);
    auto band = conservation_band(psi, a, 1.0, 0.1);
    CHECK(band.size() == 8);
    Polytope poly = build_polytope(10.0, 3, 2, {}, band);
    Matrix ok = Matrix::Zero(3, 2);
    ok(0, 0) = 1.0;
    CHECK(poly.violation(ok) == 0.0);
    ok(0, 0) = 1.5;
    CHECK(poly.violation(ok) == doctest::Approx(0.4));
  }

  TEST_CASE("scale pooling and constraint rescaling") {
    RowScales scales{(Vector(4) << 1, 3, 2, 5).finished()};
    RowScales pooled = pool_tied_scales(scales, {TieGroup{{{0, 0, 1}, {1, 1, 1}}}});
    CHECK(pooled.scales(0) == doctest::Approx(std::sqrt(5.0)));
    CHECK(pooled.scales(1) == pooled.scales(0));
    CHECK(pooled.scales(2) == 2.0);
    CHECK(pooled.scales(3) == 5.0);

    // a raw-feasible Xi stays feasible once mapped to scaled units
    Dictionary mm = monomial_dictionary(4, 2);
    Matrix xi = true_coefficients(michaelis_menten_model(0.01, 1.0, 1.0), mm);
    Vector s = Vector::LinSpaced(mm.size(), 0.5, 3.0);
    Matrix scaled = s.asDiagonal() * xi;
    Polytope poly = build_polytope(scaled.cwiseAbs().sum(), mm.size(), 4, {}, rescale_constraints(mm_conservation(mm), RowScales{s}));
    CHECK(poly.violation(scaled) <= 1e-12);
  }
}
