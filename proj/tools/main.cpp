#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "sparsedyn/config.hpp"
#include "sparsedyn/errors.hpp"
#include "sparsedyn/harness.hpp"
#include "sparsedyn/io.hpp"

using namespace sparsedyn;
namespace fs = std::filesystem;

namespace {

struct DataFlags {
  std::string model;
  int dim = 0;
  std::optional<std::size_t> experiments, points;
  std::optional<double> t_max;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string formulation;
  std::string derivative;
  std::string quadrature;
  std::string targets;

  void add(CLI::App* app) {
    app->add_option("--model", model, "kuramoto, fput, mm or springmass")->required();
    app->add_option("--dim", dim, "state dimension (default: model's natural size)");
    app->add_option("--experiments", experiments, "number of experiments");
    app->add_option("--points", points, "total samples over all experiments");
    app->add_option("--t-max", t_max, "length of each experiment");
    app->add_option("--noise", noise, "noise level eta");
    app->add_option("--seed", seed, "random seed");
  }
  void add_problem(CLI::App* app) {
    app->add_option("--formulation", formulation, "differential or integral");
    app->add_option("--derivative", derivative, "central or localpoly");
    app->add_option("--quadrature", quadrature, "trapezoid, simpson or localpoly");
    app->add_option("--targets", targets, "estimated, observed_velocity or exact");
  }

  ExperimentConfig config() const {
    const ModelKind kind = model_kind_from_string(model);
    int d = dim;
    if (d == 0) d = kind == ModelKind::MichaelisMenten ? 4 : kind == ModelKind::SpringMass ? 2 : 5;
    ExperimentConfig c = default_config(kind, d);
    if (experiments) c.experiments = *experiments;
    if (points) c.points = *points;
    if (t_max) c.t_max = *t_max;
    c.eta = {noise};
    c.repetitions = 1;
    c.seed = seed;
    if (!formulation.empty()) c.problem.formulation = formulation_from_string(formulation);
    if (!derivative.empty()) c.problem.estimator.method = diff_method_from_string(derivative);
    if (!quadrature.empty()) c.problem.estimator.quadrature = quadrature_from_string(quadrature);
    if (targets == "exact") {
      c.problem.targets = TargetSource::Exact;
    } else if (targets == "observed_velocity") {
      c.problem.targets = TargetSource::ObservedVelocity;
    } else if (!targets.empty() && targets != "estimated") {
      throw InputError("unknown targets '" + targets + "'");
    }
    return c;
  }
};

Dataset make_data(const ExperimentConfig& c) { return noisy_dataset(c, clean_dataset(c, 0), 0, 0); }

int run_generate(const DataFlags& flags, const std::string& out) {
  const ExperimentConfig c = flags.config();
  c.validate();
  save_dataset(out, make_data(c));
  std::cout << "wrote " << c.experiments << " experiments to " << out << "\n";
  return 0;
}

int run_fit(const DataFlags& flags, const std::string& solver_name, bool constraints, std::optional<double> alpha,
            std::optional<double> hyper, const std::string& dataset, const std::string& out) {
  std::optional<Dataset> loaded;
  DataFlags effective = flags;
  if (!dataset.empty()) {
    loaded = load_dataset(dataset);
    if (effective.dim == 0) effective.dim = loaded->model.dim;
  }
  ExperimentConfig c = effective.config();
  c.alpha = alpha;
  const std::string solver = constraints && !is_tuned_solver(solver_name) ? solver_name + "_c" : solver_name;
  c.solvers = {solver};
  c.validate();
  Dataset data = loaded ? std::move(*loaded) : make_data(c);
  if (!dataset.empty()) {
    if (data.model.kind != c.model.kind || data.model.dim != c.model.dim) {
      throw InputError("dataset model does not match --model/--dim");
    }
    c.experiments = data.experiments.size();
  }
  const FitOutput fit = fit_single(c, data, solver, hyper);
  const Dictionary dict = make_dictionary(c.dictionary);
  fs::create_directories(out);
  Json coeffs = coefficients_to_json(fit.cell.omega, dict);
  coeffs["model"] = model_to_json(data.model);
  coeffs["solver"] = solver;
  coeffs["formulation"] = to_string(c.problem.formulation);
  coeffs["eta"] = data.noise_level;
  coeffs["hyperparameter"] = fit.cell.hyperparameter;
  coeffs["metrics"] = metrics_to_json(fit.cell.metrics);
  coeffs["warnings"] = fit.cell.warnings;
  write_json(fs::path(out) / "coefficients.json", coeffs);
  write_json(fs::path(out) / "report.json", report_to_json(fit.report));
  write_json(fs::path(out) / "dictionary.json", dictionary_to_json(dict));
  if (constraints) {
    write_json(fs::path(out) / "constraints.json",
               constraints_to_json(dict, fit.constraints.ties, fit.constraints.generals));
  }
  std::cout << metrics_to_json(fit.cell.metrics).dump(2) << "\n";
  return 0;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out) {
  ExperimentConfig c = load_config(config_path);
  if (!out.empty()) c.output = out;
  const ResultsBundle b = run_sweep(c);
  write_results(c.output, b, c);
  std::cout << "wrote " << b.cells.size() << " rows to " << (c.output / "results.csv").string() << "\n";
  return 0;
}

int run_sample_sweep(const std::string& config_path, std::vector<std::size_t> samples, const std::string& out) {
  ExperimentConfig c = load_config(config_path);
  if (!out.empty()) c.output = out;
  if (samples.empty()) samples = c.sample_grid;
  const ResultsBundle b = sample_efficiency_sweep(c, samples);
  write_sample_efficiency(c.output, b);
  std::cout << "wrote " << b.aggregates.size() << " rows to " << (c.output / "sample_efficiency.csv").string() << "\n";
  return 0;
}

int run_simulate(const DataFlags& flags, const std::string& coefficients, double t_max, double dt, const std::string& out) {
  ExperimentConfig c = flags.config();
  ModelSpec model = repetition_model(c, 0);
  Json j;
  if (!coefficients.empty()) {
    j = read_json(coefficients);
    if (j.contains("model")) model = model_from_json(j.at("model"));
    c.dictionary = dictionary_spec_from_json(j.at("dictionary"));
  }
  const Dictionary dict = make_dictionary(c.dictionary);
  const Matrix omega = coefficients.empty() ? true_coefficients(model, dict) : coefficients_from_json(j, dict);
  const Vector x0 = sinusoid_initial_state(model.dim);
  std::optional<Vector> v0;
  if (model.order() == 2) v0 = Vector::Zero(model.dim);
  const SimulationResult sim = simulate_comparison(omega, model, dict, x0, v0, t_max, dt);
  write_simulation(out, sim);
  if (sim.blowup_time) std::cout << "learned dynamic blew up at t = " << format_double(*sim.blowup_time) << "\n";
  std::cout << "final divergence " << format_double(sim.divergence.back()) << "\n";
  return 0;
}

int run_metrics(const std::string& dataset, const std::string& coefficients, double zero_tol,
                const std::string& quadrature, const std::string& out) {
  const Dataset data = load_dataset(dataset);
  const Json j = read_json(coefficients);
  const Dictionary dict = make_dictionary(dictionary_spec_from_json(j.at("dictionary")));
  const Matrix omega = coefficients_from_json(j, dict);
  EstimatorSpec est;
  if (!quadrature.empty()) est.quadrature = quadrature_from_string(quadrature);
  std::vector<const Experiment*> test;
  for (const auto& e : data.experiments) test.push_back(&e);
  const MetricReport m =
      compute_metrics(omega, true_coefficients(data.model, dict), test, dict, est, zero_tol, data.noise_level);
  const Json mj = metrics_to_json(m);
  if (!out.empty()) write_json(out, mj);
  std::cout << mj.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse recovery of governing equations from trajectory data"};
  app.require_subcommand(1);

  DataFlags gen_flags;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "simulate a model and write a noisy dataset");
  gen_flags.add(gen);
  gen->add_option("--out", gen_out, "output directory")->required();

  DataFlags fit_flags;
  std::string fit_solver = "bcg", fit_out, fit_dataset;
  bool fit_constraints = false;
  std::optional<double> fit_alpha, fit_hyper;
  auto* fit = app.add_subcommand("fit", "fit one solver on one dataset");
  fit_flags.add(fit);
  fit_flags.add_problem(fit);
  fit->add_option("--solver", fit_solver, "bcg, cg, fccg, stlsq or fista");
  fit->add_flag("--constraints", fit_constraints, "add the model's symmetry or conservation constraints");
  fit->add_option("--alpha", fit_alpha, "l1 radius (default: twice the least-squares l1 norm)");
  fit->add_option("--hyper", fit_hyper, "STLSQ threshold or FISTA lambda (default: tuned on validation)");
  fit->add_option("--dataset", fit_dataset, "load this dataset instead of generating one");
  fit->add_option("--out", fit_out, "output directory")->required();

  std::string sweep_config, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "noise sweep from a config file");
  sweep->add_option("--config", sweep_config, "config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_out, "output directory (overrides the config)");

  std::string ss_config, ss_out;
  std::vector<std::size_t> ss_samples;
  auto* ss = app.add_subcommand("sample-sweep", "noise by training-size grid");
  ss->add_option("--config", ss_config, "config file")->required()->check(CLI::ExistingFile);
  ss->add_option("--samples", ss_samples, "training experiment counts (overrides the config)");
  ss->add_option("--out", ss_out, "output directory (overrides the config)");

  DataFlags sim_flags;
  std::string sim_coeffs, sim_out;
  double sim_tmax = 10.0, sim_dt = 0.01;
  auto* sim = app.add_subcommand("simulate", "integrate learned and true dynamics from a sinusoid start");
  sim_flags.add(sim);
  sim->add_option("--coefficients", sim_coeffs, "coefficients.json from fit (default: the true coefficients)");
  sim->add_option("--t-end", sim_tmax, "simulated time");
  sim->add_option("--dt", sim_dt, "output spacing");
  sim->add_option("--out", sim_out, "trajectory csv")->required();

  std::string met_dataset, met_coeffs, met_quad, met_out;
  double met_zero = 0.0;
  auto* met = app.add_subcommand("metrics", "score saved coefficients on a saved dataset");
  met->add_option("--dataset", met_dataset, "dataset directory")->required();
  met->add_option("--coefficients", met_coeffs, "coefficients json")->required()->check(CLI::ExistingFile);
  met->add_option("--zero-tol", met_zero, "magnitude counted as zero");
  met->add_option("--quadrature", met_quad, "quadrature for the trajectory error");
  met->add_option("--out", met_out, "write the metrics json here");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return run_generate(gen_flags, gen_out);
    if (*fit) return run_fit(fit_flags, fit_solver, fit_constraints, fit_alpha, fit_hyper, fit_dataset, fit_out);
    if (*sweep) return run_sweep_cmd(sweep_config, sweep_out);
    if (*ss) return run_sample_sweep(ss_config, ss_samples, ss_out);
    if (*sim) return run_simulate(sim_flags, sim_coeffs, sim_tmax, sim_dt, sim_out);
    if (*met) return run_metrics(met_dataset, met_coeffs, met_zero, met_quad, met_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
