#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "helpers.hpp"
#include "sparsedyn/config.hpp"
#include "sparsedyn/constraints.hpp"
#include "sparsedyn/dictionary.hpp"
#include "sparsedyn/dynamics.hpp"
#include "sparsedyn/errors.hpp"
#include "sparsedyn/io.hpp"

using namespace sparsedyn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("sparsedyn_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("double formatting round trips") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-30, 30);
    for (int i = 0; i < 1000; ++i) {
      const double v = std::ldexp(u(rng), static_cast<int>(u(rng)));
      CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-5) == "1e-05");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(std::isnan(parse_double("nan")));
    CHECK(std::isinf(parse_double(format_double(-std::numeric_limits<double>::infinity()))));
    CHECK_THROWS(parse_double("1.5x"));
  }

  TEST_CASE("csv and matrix files") {
    const fs::path dir = scratch("csv");
    CsvTable t{{"a", "b"}, {{"1", "x"}, {"2.5", "y"}}};
    write_csv(dir / "t.csv", t);
    CsvTable back = read_csv(dir / "t.csv");
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);

    std::mt19937_64 rng(5);
    Matrix m = testing::random_matrix(rng, 4, 3);
    write_matrix_csv(dir / "m.csv", m);
    CHECK(read_matrix_csv(dir / "m.csv") == m);
    CHECK(matrix_from_json(matrix_to_json(m)) == m);
  }

  TEST_CASE("dataset round trip") {
    const fs::path dir = scratch("data");
    for (ModelSpec model : {kuramoto_model(3, 2.0, 0.2, std::uint64_t(3)), fput_model(2, 0.7)}) {
      Dataset clean = generate_experiments(model, 2, 20, 1.0, 9);
      Dataset noisy = contaminate(clean, 1e-3, 11);
      save_dataset(dir, noisy);
      Dataset back = load_dataset(dir);
      REQUIRE(back.experiments.size() == 2);
      CHECK(back.model.kind == model.kind);
      CHECK(back.model.dim == model.dim);
      CHECK(back.noise_level == noisy.noise_level);
      CHECK(back.model.natural_frequencies == model.natural_frequencies);
      for (std::size_t k = 0; k < 2; ++k) {
        CHECK(back.experiments[k].t == noisy.experiments[k].t);
        CHECK(back.experiments[k].X == noisy.experiments[k].X);
        CHECK(back.experiments[k].Y == noisy.experiments[k].Y);
        CHECK(back.experiments[k].V == noisy.experiments[k].V);
        CHECK(back.experiments[k].W == noisy.experiments[k].W);
      }
    }
  }

  TEST_CASE("problem round trip") {
    const fs::path dir = scratch("problem");
    std::mt19937_64 rng(6);
    RegressionProblem p = testing::random_problem(rng, 6, 2, 30);
    save_problem(dir, p);
    RegressionProblem q = load_problem(dir);
    CHECK(q.A() == p.A());
    CHECK(q.B() == p.B());
    CHECK(q.radius() == p.radius());
    CHECK(q.formulation() == p.formulation());
    CHECK(q.scales().scales == p.scales().scales);
  }

  TEST_CASE("coefficients round trip by label") {
    ModelSpec model = fput_model(3, 0.7);
    Dictionary dict = make_dictionary({DictionarySpec::Kind::Monomial, 3, 3});
    Matrix xi = true_coefficients(model, dict);
    Json j = coefficients_to_json(xi, dict);
    CHECK(j.at("nonzeros").size() == static_cast<std::size_t>((xi.array() != 0).count()));
    CHECK(coefficients_from_json(j, dict) == xi);
    Json k = j;
    k["nonzeros"][0]["label"] = "not_a_label";
    CHECK_THROWS(coefficients_from_json(k, dict));
  }

  TEST_CASE("constraints round trip") {
    Dictionary trig = trig_pairwise_dictionary(3);
    std::vector<TieGroup> ties = kuramoto_symmetry(trig, 3);
    std::vector<TieGroup> ties_back;
    std::vector<LinearConstraint> gen_back;
    constraints_from_json(constraints_to_json(trig, ties, {}), trig, ties_back, gen_back);
    REQUIRE(ties_back.size() == ties.size());
    CHECK(gen_back.empty());
    for (std::size_t g = 0; g < ties.size(); ++g) {
      REQUIRE(ties_back[g].members.size() == ties[g].members.size());
      for (std::size_t m = 0; m < ties[g].members.size(); ++m) {
        CHECK(ties_back[g].members[m].row == ties[g].members[m].row);
        CHECK(ties_back[g].members[m].col == ties[g].members[m].col);
        CHECK(ties_back[g].members[m].sign == ties[g].members[m].sign);
      }
    }

    Dictionary mono = make_dictionary({DictionarySpec::Kind::Monomial, 4, 2});
    std::vector<LinearConstraint> gens = mm_conservation(mono);
    ties_back.clear();
    constraints_from_json(constraints_to_json(mono, {}, gens), mono, ties_back, gen_back);
    REQUIRE(gen_back.size() == gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i) {
      CHECK(gen_back[i].coefficients == gens[i].coefficients);
      CHECK(gen_back[i].rhs == gens[i].rhs);
      CHECK(gen_back[i].relation == gens[i].relation);
    }
  }

  TEST_CASE("config round trip and validation") {
    ExperimentConfig c = default_config(ModelKind::Kuramoto, 5);
    c.eta = {1e-5, 1e-3};
    c.solvers = {"bcg", "fista"};
    c.alpha = 12.5;
    c.repetitions = 3;
    c.seed = 99;
    ExperimentConfig back = parse_config(format_config(c));
    CHECK(format_config(back) == format_config(c));
    CHECK(back.eta == c.eta);
    CHECK(back.solvers == c.solvers);
    CHECK(back.alpha == c.alpha);
    CHECK(back.stlsq_grid == c.stlsq_grid);
    CHECK(back.model.dim == 5);

    const std::string base = "[model]\nkind = fput\ndim = 3\n";
    ExperimentConfig f = parse_config(base + "[sweep]\neta = [1e-4]\nrepetitions = 2\n");
    CHECK(f.model.kind == ModelKind::FPUT);
    CHECK(f.eta == std::vector<double>{1e-4});
    CHECK(f.repetitions == 2);
    CHECK_THROWS_AS(parse_config(base + "[sweep]\nbogus = 1\n"), InputError);
    CHECK_THROWS_AS(parse_config(base + "[nowhere]\nx = 1\n"), InputError);
    CHECK_THROWS_AS(parse_config("[model]\ndim = 3\n"), InputError);
    CHECK_THROWS_AS(parse_config(base + "[sweep]\nrepetitions = -1\n"), InputError);
    CHECK_THROWS_AS(parse_config(base + "[sweep]\nsolvers = [bcg, magic]\n"), InputError);
  }

  TEST_CASE("logspace") {
    std::vector<double> g = logspace(1e-6, 1e1, 15);
    REQUIRE(g.size() == 15);
    CHECK(g.front() == doctest::Approx(1e-6));
    CHECK(g.back() == doctest::Approx(10.0));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(10.0, 0.5)));
  }
}
