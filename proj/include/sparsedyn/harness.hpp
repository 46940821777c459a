#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sparsedyn/config.hpp"
#include "sparsedyn/constraints.hpp"
#include "sparsedyn/metrics.hpp"
#include "sparsedyn/problem.hpp"
#include "sparsedyn/solvers.hpp"

namespace sparsedyn {

struct Split {
  std::vector<std::size_t> train, validation, test;
};

// Whole experiments are shuffled with the seed and assigned round(0.7 c) to
// train, round(0.2 c) to validation and the rest to test.
Split split_dataset(std::size_t experiments, const std::array<double, 3>& fractions, std::uint64_t seed);

// Ties and general constraints known for a model over its dictionary, the
// generals written on raw coefficients.
struct ModelConstraints {
  std::vector<TieGroup> ties;
  std::vector<LinearConstraint> generals;
};
ModelConstraints model_constraints(const ModelSpec& model, const Dictionary& dict);

// Raw training blocks normalized with scales pooled over tied rows, radius
// set to `alpha` or the default.
RegressionProblem make_training_problem(const FeatureTargets& raw, Formulation formulation, int order,
                                        const std::vector<TieGroup>& ties, bool normalize,
                                        std::optional<double> alpha = std::nullopt);

bool is_constrained_solver(const std::string& name);
bool is_tuned_solver(const std::string& name);

struct SolveSettings {
  SolverOptions options;
  const Polytope* plain = nullptr;        // used by bcg, cg, fccg
  const Polytope* constrained = nullptr;  // used by the _c variants
};

// One solve by solver name; hyperparameter is the STLSQ threshold or the
// FISTA lambda and ignored otherwise.
SolveReport run_solver(const std::string& name, const RegressionProblem& p, const SolveSettings& settings,
                       double hyperparameter = 0.0);

// ||B - Omega^T A||_F^2 of unscaled coefficients on raw validation blocks.
double validation_residual(const Matrix& omega_unscaled, const FeatureTargets& validation);

struct TuneResult {
  double value = 0.0;
  std::vector<double> residuals;  // NaN where the solve failed
  std::vector<std::string> warnings;
};

// Grid value with the smallest validation residual; ties go to the smallest
// grid value. Failed grid points are skipped with a warning.
TuneResult tune_hyperparameter(const std::string& solver, const std::vector<double>& grid,
                               const RegressionProblem& train, const FeatureTargets& validation,
                               const SolveSettings& settings = {});

struct CellResult {
  std::string solver;
  Formulation formulation = Formulation::Integral;
  double eta = 0.0;
  std::size_t eta_index = 0;
  std::size_t rep = 0;
  std::size_t samples = 0;  // training experiments
  MetricReport metrics;
  double fw_gap = 0.0;
  std::size_t iterations = 0;
  double seconds = 0.0;
  double hyperparameter = 0.0;
  Matrix omega;  // unscaled
  bool failed = false;
  std::string error;
  std::vector<std::string> warnings;
};

struct AggregateRow {
  std::string solver;
  Formulation formulation = Formulation::Integral;
  double eta = 0.0;
  std::size_t samples = 0;
  std::size_t count = 0;  // successful cells
  // mean and std over repetitions
  std::array<double, 2> E_R{}, E_D{}, E_T{}, S_E{}, S_M{};
  std::array<double, 2> E_R_eta{}, E_D_eta{}, E_T_eta{};
};

struct ResultsBundle {
  std::vector<CellResult> cells;
  std::vector<AggregateRow> aggregates;
};

// Clean data for repetition `rep` (and the Kuramoto frequencies) depend on
// (seed, rep) only; noise on (seed, eta index, rep).
Dataset clean_dataset(const ExperimentConfig& config, std::size_t rep);
ModelSpec repetition_model(const ExperimentConfig& config, std::size_t rep);

// Clean data contaminated at config.eta[eta_index].
Dataset noisy_dataset(const ExperimentConfig& config, const Dataset& clean, std::size_t eta_index, std::size_t rep);
Split repetition_split(const ExperimentConfig& config, std::size_t rep);

struct FitOutput {
  CellResult cell;
  SolveReport report;
  ModelConstraints constraints;  // raw-coefficient constraints available to _c solvers
};

// One cell of a sweep on a given noisy dataset: split with the repetition-0
// seed, tune baselines unless a hyperparameter is given, solve, score on the
// test partition.
FitOutput fit_single(const ExperimentConfig& config, const Dataset& noisy, const std::string& solver,
                     std::optional<double> hyperparameter = std::nullopt);

ResultsBundle run_sweep(const ExperimentConfig& config);
// One bundle row per (solver, eta, samples) aggregated over repetitions.
ResultsBundle sample_efficiency_sweep(const ExperimentConfig& config, const std::vector<std::size_t>& sample_grid);

std::vector<AggregateRow> aggregate(const std::vector<CellResult>& cells);

// results.csv, aggregate.csv and coefficients/*.json under `dir`.
void write_results(const std::filesystem::path& dir, const ResultsBundle& bundle, const ExperimentConfig& config);
// sample_efficiency.csv under `dir`.
void write_sample_efficiency(const std::filesystem::path& dir, const ResultsBundle& bundle);

struct SimulationResult {
  std::vector<double> t;
  Matrix learned;  // d x k positions
  Matrix truth;
  std::vector<double> divergence;
  std::optional<double> blowup_time;
};

// Integrates the learned dynamic Omega^T psi (as acceleration for order-2
// models) and the true model from the same start, reporting the distance of
// the positions at every output time. A learned blow-up truncates the series.
SimulationResult simulate_comparison(const Matrix& omega, const ModelSpec& model, const Dictionary& dict,
                                     const Vector& x0, const std::optional<Vector>& v0, double t_max, double dt_out,
                                     double tol = 1e-10);
// x_i = sin(pi i / (d + 1)) with zero velocity.
Vector sinusoid_initial_state(int d);

void write_simulation(const std::filesystem::path& path, const SimulationResult& sim);

}  // namespace sparsedyn
