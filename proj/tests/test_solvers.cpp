#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "sparsedyn/constraints.hpp"
#include "sparsedyn/dictionary.hpp"
#include "sparsedyn/dynamics.hpp"
#include "sparsedyn/errors.hpp"
#include "sparsedyn/problem.hpp"
#include "sparsedyn/solvers.hpp"

using namespace sparsedyn;

namespace {

Matrix brute_force_lmo(const Matrix& G, double alpha) {
  Matrix best = Matrix::Zero(G.rows(), G.cols());
  double best_val = 0.0;
  for (Eigen::Index j = 0; j < G.cols(); ++j) {
    for (Eigen::Index i = 0; i < G.rows(); ++i) {
      for (double s : {-1.0, 1.0}) {
        const double val = s * alpha * G(i, j);
        if (val < best_val) {
          best_val = val;
          best.setZero();
          best(i, j) = s * alpha;
        }
      }
    }
  }
  return best;
}

double dot(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

}  // namespace

TEST_SUITE("solvers") {
  TEST_CASE("closed-form LMO") {
    Matrix G(2, 2);
    G << 2, -3, 1, 0;
    Polytope ball = build_polytope(1.0, 2, 2, {});
    auto r = lmo_closed_form(G, ball);
    CHECK(r.vertex(0, 1) == 1.0);
    CHECK(r.vertex.cwiseAbs().sum() == 1.0);
    CHECK(dot(r.vertex, G) == -3.0);

    // all weights 2: tie every position with one duplicate-free partner is not
    // possible in a 2x2, so build a 4x2 gradient whose tied copies mirror G
    Matrix G4 = Matrix::Zero(4, 2);
    G4.topRows(2) = G;
    G4.bottomRows(2) = G;
    std::vector<TieGroup> ties;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) ties.push_back(TieGroup{{{i, j, 1}, {i + 2, j, 1}}});
    }
    Polytope weighted = build_polytope(1.0, 4, 2, ties);
    CHECK((weighted.weights().array() == 2.0).all());
    auto w = lmo_closed_form(G4, weighted);
    CHECK(w.vertex(0, 1) == 0.5);
    CHECK(w.vertex(2, 1) == 0.5);
    CHECK(dot(w.vertex.topRows(2), G) == -1.5);

    auto z = lmo_closed_form(Matrix::Zero(2, 2), ball);
    CHECK(z.zero_gradient);
    CHECK(z.vertex.isZero(0));

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      Matrix R = testing::random_matrix(rng, 4, 3);
      Polytope b = build_polytope(1.7, 4, 3, {});
      CHECK(dot(lmo_closed_form(R, b).vertex, R) == doctest::Approx(dot(brute_force_lmo(R, 1.7), R)).epsilon(1e-14));
    }
  }

  TEST_CASE("LP LMO") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
      Matrix R = testing::random_matrix(rng, 5, 3);
      Polytope b = build_polytope(2.0, 5, 3, {});
      CHECK(std::abs(dot(lmo_lp(R, b).vertex, R) - dot(lmo_closed_form(R, b).vertex, R)) <= 1e-9);
    }

    // forcing Omega(0,0) = 0 moves the mass to the runner-up coordinate
    Matrix G(2, 1);
    G << -5, 2;
    Matrix force = Matrix::Zero(2, 1);
    force(0, 0) = 1.0;
    Polytope constrained = build_polytope(1.0, 2, 1, {}, {LinearConstraint{force, 0.0, Relation::Eq}});
    CHECK(constrained.strategy() == LmoStrategy::LinearProgram);
    Matrix v = lmo(G, constrained).vertex;
    CHECK(v(0, 0) == doctest::Approx(0.0));
    CHECK(v(1, 0) == doctest::Approx(-1.0));

    Polytope empty = build_polytope(0.0, 2, 1, {}, {LinearConstraint{force, 0.0, Relation::Eq}});
    CHECK(lmo(G, empty).vertex.isZero(0));

    Polytope infeasible = build_polytope(1.0, 2, 1, {}, {LinearConstraint{force, 5.0, Relation::Eq}});
    CHECK_THROWS_AS(lmo(G, infeasible), InfeasibleError);
  }

  TEST_CASE("LP LMO honours Michaelis-Menten conservation") {
    Dictionary dict = monomial_dictionary(4, 2);
    Polytope poly = build_polytope(3.0, dict.size(), 4, {}, mm_conservation(dict));
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
      Matrix v = lmo(testing::random_matrix(rng, dict.size(), 4), poly).vertex;
      CHECK(poly.violation(v) <= 1e-9);
      CHECK(v.cwiseAbs().sum() == doctest::Approx(3.0));
    }
  }

  TEST_CASE("simplex projection") {
    Vector inside(3);
    inside << 0.2, 0.3, 0.5;
    CHECK((project_simplex(inside) - inside).norm() <= 1e-15);
    CHECK(project_simplex(Vector::Constant(1, -4.0))(0) == 1.0);
    Vector a(2), b(2);
    a << 2, 0;
    b << 0.2, 0.3;
    CHECK(project_simplex(a)(0) == doctest::Approx(1.0));
    CHECK(project_simplex(a)(1) == doctest::Approx(0.0));
    CHECK(project_simplex(b)(0) == doctest::Approx(0.45));
    CHECK(project_simplex(b)(1) == doctest::Approx(0.55));

    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 20; ++trial) {
      Vector v = 3 * testing::random_matrix(rng, 6, 1);
      Vector p = project_simplex(v);
      CHECK(p.minCoeff() >= 0.0);
      CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-14));
      // optimality: (v - p) . (q - p) <= 0 for every vertex q
      for (int i = 0; i < 6; ++i) {
        Vector q = Vector::Unit(6, i);
        CHECK((v - p).dot(q - p) <= 1e-12);
      }
    }
  }

  TEST_CASE("accelerated simplex descent") {
    auto one = apgd_simplex_ls(Matrix::Ones(2, 1), Vector::Zero(2), Vector::Ones(1), 1e-9, 100);
    CHECK(one.weights(0) == 1.0);
    CHECK(one.reached);

    Vector e1 = Vector::Unit(2, 0);
    auto r = apgd_simplex_ls(Matrix::Identity(2, 2), e1, Vector::Constant(2, 0.5), 1e-10, 10000);
    CHECK(r.reached);
    CHECK(r.gap <= 1e-10);
    CHECK(r.weights(0) == doctest::Approx(1.0).epsilon(1e-6));

    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 5; ++trial) {
      Matrix Lambda = testing::random_matrix(rng, 4, 2);
      Vector b = testing::random_matrix(rng, 4, 1);
      auto s = apgd_simplex_ls(Lambda, b, Vector::Constant(2, 0.5), 1e-12, 100000);
      const double got = (Lambda * s.weights - b).squaredNorm();
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= 10000; ++k) {
        Vector l(2);
        l << k * 1e-4, 1 - k * 1e-4;
        best = std::min(best, (Lambda * l - b).squaredNorm());
      }
      CHECK(got <= best + 1e-6);
      CHECK(got >= best - 1e-6);
    }
  }

  TEST_CASE("conditional gradient") {
    Matrix A(1, 3), B(1, 3);
    A << 1, 2, 3;
    B << 0.5, 1.0, 1.5;
    RegressionProblem p = RegressionProblem(A, B).with_radius(1.0);
    Polytope ball = build_polytope(1.0, 1, 1, {});
    auto at_opt = cg_solve(p, ball, Matrix::Constant(1, 1, 0.5));
    CHECK(at_opt.fw_gap <= 1e-12);
    CHECK(at_opt.iterations == 0);

    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 5; ++trial) {
      RegressionProblem q = testing::random_problem(rng, 8, 2, 30);
      Polytope poly = build_polytope(q.radius(), 8, 2, {});
      const double f_star = objective(q, bcg_solve(q, poly, SolverOptions{.gap_tolerance = 1e-11}).omega);
      Matrix start = lmo(gradient(q, Matrix::Zero(8, 2)), poly).vertex;
      std::size_t violations = 0;
      SolverOptions opts;
      opts.max_iterations = 300;
      opts.on_iterate = [&](std::size_t, const Matrix& omega) {
        if (omega.cwiseAbs().sum() > q.radius() + 1e-9) ++violations;
        if (objective(q, omega) - f_star > frank_wolfe_gap(q, poly, omega) + 1e-9) ++violations;
      };
      auto rep = cg_solve(q, poly, start, opts);
      CHECK(violations == 0);
      for (std::size_t k = 1; k < rep.trace.size(); ++k) {
        CHECK(rep.trace[k].objective <= rep.trace[k - 1].objective + 1e-12 * (1 + rep.trace[k - 1].objective));
        CHECK(rep.trace[k].vertices <= k + 1);
      }
      CHECK(rep.clipped_steps <= 1);
    }
  }

  TEST_CASE("fully corrective conditional gradient") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
      RegressionProblem q = testing::random_problem(rng, 8, 2, 30);
      Polytope poly = build_polytope(q.radius(), 8, 2, {});
      const Matrix zero = Matrix::Zero(8, 2);

      // one step from zero: best multiple of the first vertex
      SolverOptions one;
      one.max_iterations = 1;
      auto r1 = fccg_solve(q, poly, zero, one);
      const Matrix V = lmo(gradient(q, zero), poly).vertex;
      const Matrix VA = V.transpose() * q.A();
      const double gamma = std::clamp(dot(VA, q.B()) / VA.squaredNorm(), 0.0, 1.0);
      CHECK(objective(q, r1.omega) == doctest::Approx(objective(q, gamma * V)).epsilon(1e-8));

      SolverOptions budget;
      budget.max_iterations = 25;
      budget.gap_tolerance = 0.0;
      auto fc = fccg_solve(q, poly, zero, budget);
      auto cg = cg_solve(q, poly, zero, budget);
      CHECK(objective(q, fc.omega) <= objective(q, cg.omega) + 1e-10);
      CHECK(fc.vertex_count <= fc.iterations);
      for (std::size_t k = 1; k < fc.trace.size(); ++k) {
        CHECK(fc.trace[k].objective <= fc.trace[k - 1].objective + 1e-12 * (1 + fc.trace[k - 1].objective));
      }
    }
  }

  TEST_CASE("blended conditional gradient") {
    std::mt19937_64 rng(18);
    for (int trial = 0; trial < 5; ++trial) {
      RegressionProblem q = testing::random_problem(rng, 10, 3, 40);
      Polytope poly = build_polytope(q.radius(), 10, 3, {});
      const double f_star = objective(q, bcg_solve(q, poly, SolverOptions{.gap_tolerance = 1e-11}).omega);
      std::size_t prev_vertices = 0;
      bool grew_too_fast = false;
      SolverOptions opts;
      auto rep = bcg_solve(q, poly, opts);
      CHECK(rep.converged);
      CHECK(rep.fw_gap <= 1e-6);
      CHECK(objective(q, rep.omega) - f_star <= rep.fw_gap + 1e-9);
      for (const auto& rec : rep.trace) {
        if (rec.vertices > prev_vertices + 1) grew_too_fast = true;
        prev_vertices = rec.vertices;
      }
      CHECK_FALSE(grew_too_fast);
      for (std::size_t k = 1; k < rep.trace.size(); ++k) {
        CHECK(rep.trace[k].objective <= rep.trace[k - 1].objective + 1e-12 * (1 + rep.trace[k - 1].objective));
      }
    }
  }

  TEST_CASE("solvers agree on strictly convex interior instances") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 3; ++trial) {
      RegressionProblem q = testing::random_problem(rng, 5, 2, 40, 0.05);
      Polytope poly = build_polytope(q.radius(), 5, 2, {});
      SolverOptions tight;
      tight.gap_tolerance = 1e-9;
      tight.max_iterations = 200000;
      const double fb = objective(q, bcg_solve(q, poly, tight).omega);
      const double ff = objective(q, fccg_solve(q, poly, Matrix::Zero(5, 2), tight).omega);
      const double fc = objective(q, cg_solve(q, poly, Matrix::Zero(5, 2), tight).omega);
      const double fi = objective(q, fista_solve(q, 0.0, {.tolerance = 1e-14}).omega);
      CHECK(std::abs(fb - ff) <= 1e-5);
      CHECK(std::abs(fb - fc) <= 1e-5);
      CHECK(std::abs(fb - fi) <= 1e-5);
    }
  }

  TEST_CASE("BCG recovers noiseless Kuramoto") {
    ModelSpec model = kuramoto_model(2, 2.0, 0.2, std::uint64_t(5));
    Dataset data = generate_experiments(model, 10, 200, 2.0, 5);
    Dictionary dict = trig_pairwise_dictionary(2);
    ProblemOptions opts;
    opts.formulation = Formulation::Differential;
    opts.targets = TargetSource::Exact;
    RegressionProblem p = build_problem(data, dict, opts);
    Polytope poly = build_polytope(p.radius(), dict.size(), 2, {});
    auto rep = bcg_solve(p, poly);
    const Matrix omega = unscale_coefficients(rep.omega, p.scales());
    CHECK((omega - true_coefficients(model, dict)).norm() <= 1e-4);
  }

  TEST_CASE("BCG iterates stay feasible under constraints") {
    ModelSpec model = michaelis_menten_model(0.01, 1.0, 1.0);
    Dataset data = generate_experiments(model, 4, 100, 1.0, 6);
    Dictionary dict = monomial_dictionary(4, 2);
    ProblemOptions opts;
    opts.formulation = Formulation::Differential;
    opts.targets = TargetSource::Exact;
    RegressionProblem p = build_problem(data, dict, opts);
    // conservation rows act on unscaled coefficients; scale them into problem units
    std::vector<LinearConstraint> cons = rescale_constraints(mm_conservation(dict), p.scales());
    Polytope poly = build_polytope(p.radius(), dict.size(), 4, {}, cons);
    double worst = 0.0;
    SolverOptions so;
    so.max_iterations = 200;
    so.on_iterate = [&](std::size_t, const Matrix& omega) { worst = std::max(worst, poly.violation(omega)); };
    bcg_solve(p, poly, so);
    CHECK(worst <= 1e-9);
  }

  TEST_CASE("STLSQ") {
    Matrix A = Matrix::Identity(2, 2);
    Matrix B(1, 2);
    B << 1, 0.001;
    RegressionProblem p(A, B);
    auto r = stlsq_solve(p, 0.01);
    CHECK(r.omega(0, 0) == doctest::Approx(1.0));
    CHECK(r.omega(1, 0) == 0.0);

    std::mt19937_64 rng(20);
    RegressionProblem q = testing::random_problem(rng, 6, 2, 30);
    auto ls = stlsq_solve(q, 0.0);
    CHECK((ls.omega - least_squares(q.A(), q.B())).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(ls.iterations == 1);

    auto thr = stlsq_solve(q, 0.3);
    StlsqOptions again;
    again.support = thr.omega.array() != 0.0;
    auto rerun = stlsq_solve(q, 0.3, again);
    CHECK((rerun.omega - thr.omega).cwiseAbs().maxCoeff() == 0.0);

    auto none = stlsq_solve(q, 1e9);
    CHECK(none.omega.isZero(0));
    CHECK_FALSE(none.warnings.empty());

    StlsqOptions capped;
    capped.max_rounds = 1;
    auto cap = stlsq_solve(q, 0.3, capped);
    CHECK(cap.iterations <= 1);
    CHECK_THROWS_AS(stlsq_solve(q, -1.0), InputError);
  }

  TEST_CASE("FISTA") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
      RegressionProblem q = testing::random_problem(rng, 6, 2, 30);
      const double kill = 2 * q.cross().cwiseAbs().maxCoeff();
      CHECK(fista_solve(q, kill).omega.isZero(0));

      const double f_ls = objective(q, least_squares(q.A(), q.B()));
      CHECK(objective(q, fista_solve(q, 0.0).omega) == doctest::Approx(f_ls).epsilon(1e-6));

      auto r = fista_solve(q, 0.5);
      CHECK(lasso_kkt_residual(q, r.omega, 0.5) <= 1e-5);
      CHECK(std::isnan(r.fw_gap));
    }
    CHECK_THROWS_AS(fista_solve(testing::random_problem(rng, 3, 1, 5), -1.0), InputError);
  }
}
