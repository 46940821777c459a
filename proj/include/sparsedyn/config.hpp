#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sparsedyn/dictionary.hpp"
#include "sparsedyn/dynamics.hpp"
#include "sparsedyn/estimation.hpp"
#include "sparsedyn/problem.hpp"

namespace sparsedyn {

struct ExperimentConfig {
  ModelSpec model;  // Kuramoto frequencies are redrawn per repetition
  DictionarySpec dictionary;
  ProblemOptions problem;

  std::size_t experiments = 40;
  std::size_t points = 6000;  // total over all experiments
  double t_max = 10.0;
  double integrator_tol = 1e-13;

  std::vector<std::string> solvers{"bcg", "stlsq"};
  // Band half-width for the approximate conservation rows of MM; none when unset.
  std::optional<double> conservation_eps;

  std::vector<double> eta{1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
  std::size_t repetitions = 20;
  std::array<double, 3> split{0.7, 0.2, 0.1};
  std::vector<double> stlsq_grid;
  std::vector<double> fista_grid;
  std::vector<std::size_t> sample_grid;  // training experiments per cell

  std::optional<double> alpha;  // default: twice the least-squares l1 norm
  double gap_tolerance = 1e-6;
  std::size_t max_iterations = 20000;
  std::size_t subproblem_max_iterations = 20000;

  std::uint64_t seed = 0;
  std::filesystem::path output = "results";
  bool record_wall_time = false;

  void validate() const;
};

// Paper-scale defaults for a model, including its dictionary and grids.
ExperimentConfig default_config(ModelKind kind, int dim);

// INI-style text: [section] headers, key = value, lists as [a, b, c],
// comments starting with # or ;. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string format_config(const ExperimentConfig& config);

std::vector<double> logspace(double lo, double hi, std::size_t count);

}  // namespace sparsedyn
