#include "sparsedyn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>

#include "sparsedyn/errors.hpp"
#include "sparsedyn/integrator.hpp"
#include "sparsedyn/io.hpp"

namespace sparsedyn {
namespace {

constexpr std::uint64_t kRepTag = 0x72657073;    // "reps"
constexpr std::uint64_t kNoiseTag = 0x6e6f6973;  // "nois"
constexpr std::uint64_t kSplitTag = 0x73706c74;  // "splt"

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t a, std::uint64_t b = 0) {
  return make_stream(seed, tag, a, b)();
}

std::string base_name(const std::string& solver) {
  return is_constrained_solver(solver) ? solver.substr(0, solver.size() - 2) : solver;
}

bool is_fw_family(const std::string& solver) {
  const std::string b = base_name(solver);
  return b == "bcg" || b == "cg" || b == "fccg";
}

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::array<double, 2> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {kNaN, kNaN};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

// Everything shared by the solvers of one (eta, rep, samples) cell.
struct CellInputs {
  RegressionProblem train;
  FeatureTargets validation;
  std::vector<const Experiment*> test;
  Matrix xi;
  Polytope plain;
  std::optional<Polytope> constrained;
};

CellInputs prepare_cell(const ExperimentConfig& config, const Dataset& noisy, const Dictionary& dict, const Split& split,
                        std::size_t samples, bool need_constraints) {
  if (samples == 0 || samples > split.train.size()) {
    throw InputError("requested " + std::to_string(samples) + " training experiments but the split has " +
                     std::to_string(split.train.size()));
  }
  std::vector<std::size_t> train_idx(split.train.begin(), split.train.begin() + static_cast<std::ptrdiff_t>(samples));
  const ModelConstraints mc = model_constraints(noisy.model, dict);
  FeatureTargets raw = assemble_blocks(noisy, train_idx, dict, config.problem);
  RegressionProblem train = make_training_problem(raw, config.problem.formulation, noisy.model.order(), mc.ties,
                                                  config.problem.normalize, config.alpha);
  FeatureTargets validation;
  if (!split.validation.empty()) validation = assemble_blocks(noisy, split.validation, dict, config.problem);
  std::vector<const Experiment*> test;
  for (std::size_t i : split.test) test.push_back(&noisy.experiments[i]);
  const int n = dict.size(), d = noisy.model.dim;
  Polytope plain = build_polytope(train.radius(), n, d, {});
  std::optional<Polytope> constrained;
  if (need_constraints) {
    std::vector<LinearConstraint> generals = mc.generals;
    if (config.conservation_eps && noisy.model.kind == ModelKind::MichaelisMenten) {
      for (const Vector& a : {Vector((Vector(4) << 0, 1, 1, 1).finished()), Vector((Vector(4) << 1, 0, 1, 0).finished())}) {
        auto band = conservation_band(raw.A, a, 0.0, *config.conservation_eps);
        generals.insert(generals.end(), band.begin(), band.end());
      }
    }
    constrained = build_polytope(train.radius(), n, d, mc.ties, rescale_constraints(std::move(generals), train.scales()));
  }
  return {std::move(train), std::move(validation), std::move(test), true_coefficients(noisy.model, dict),
          std::move(plain), std::move(constrained)};
}

CellResult solve_cell(const ExperimentConfig& config, const Dictionary& dict, const CellInputs& in,
                      const std::string& solver, std::optional<double> fixed = std::nullopt,
                      SolveReport* report = nullptr) {
  CellResult cell;
  cell.solver = solver;
  cell.formulation = config.problem.formulation;
  try {
    SolveSettings settings;
    settings.options.gap_tolerance = config.gap_tolerance;
    settings.options.max_iterations = config.max_iterations;
    settings.options.subproblem_max_iterations = config.subproblem_max_iterations;
    settings.plain = &in.plain;
    settings.constrained = in.constrained ? &*in.constrained : nullptr;
    double h = 0.0;
    if (is_tuned_solver(solver) && fixed) {
      h = *fixed;
    } else if (is_tuned_solver(solver)) {
      if (in.validation.A.cols() == 0) throw InputError("tuning " + solver + " needs a validation partition");
      const auto& grid = solver == "stlsq" ? config.stlsq_grid : config.fista_grid;
      TuneResult tr = tune_hyperparameter(solver, grid, in.train, in.validation, settings);
      h = tr.value;
      cell.warnings = tr.warnings;
    }
    SolveReport rep = run_solver(solver, in.train, settings, h);
    cell.omega = unscale_coefficients(rep.omega, in.train.scales());
    const double zero_tol = is_fw_family(solver) ? 0.0 : baseline_zero_tolerance(cell.omega);
    cell.metrics = compute_metrics(cell.omega, in.xi, in.test, dict, config.problem.estimator, zero_tol, 0.0);
    cell.fw_gap = rep.fw_gap;
    cell.iterations = rep.iterations;
    cell.seconds = rep.seconds;
    cell.hyperparameter = rep.hyperparameter;
    cell.warnings.insert(cell.warnings.end(), rep.warnings.begin(), rep.warnings.end());
    if (report) *report = std::move(rep);
  } catch (const std::exception& e) {
    cell.failed = true;
    cell.error = e.what();
    cell.metrics.recovery = cell.metrics.derivative = cell.metrics.trajectory = kNaN;
    cell.fw_gap = kNaN;
  }
  return cell;
}

bool needs_constraints(const ExperimentConfig& config) {
  return std::any_of(config.solvers.begin(), config.solvers.end(), is_constrained_solver);
}

ResultsBundle sweep(const ExperimentConfig& config, const std::vector<std::size_t>& sample_grid, bool by_samples) {
  config.validate();
  const Dictionary dict = make_dictionary(config.dictionary);
  ResultsBundle bundle;
  for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
    const Dataset clean = clean_dataset(config, rep);
    const Split split = repetition_split(config, rep);
    for (std::size_t ei = 0; ei < config.eta.size(); ++ei) {
      const double eta = config.eta[ei];
      const Dataset noisy = noisy_dataset(config, clean, ei, rep);
      std::vector<std::size_t> grid = by_samples ? sample_grid : std::vector<std::size_t>{split.train.size()};
      for (std::size_t samples : grid) {
        std::optional<CellInputs> inputs;
        std::string failure;
        try {
          inputs.emplace(prepare_cell(config, noisy, dict, split, samples, needs_constraints(config)));
        } catch (const InputError&) {
          throw;
        } catch (const std::exception& e) {
          failure = e.what();
        }
        for (const auto& solver : config.solvers) {
          CellResult cell;
          if (inputs) {
            cell = solve_cell(config, dict, *inputs, solver);
          } else {
            cell.solver = solver;
            cell.formulation = config.problem.formulation;
            cell.failed = true;
            cell.error = failure;
            cell.metrics.recovery = cell.metrics.derivative = cell.metrics.trajectory = kNaN;
            cell.fw_gap = kNaN;
          }
          cell.eta = eta;
          cell.eta_index = ei;
          cell.rep = rep;
          cell.samples = samples;
          cell.metrics.eta = eta;
          if (cell.failed) std::cerr << "cell " << solver << " eta=" << eta << " rep=" << rep << " failed: " << cell.error << "\n";
          bundle.cells.push_back(std::move(cell));
        }
      }
    }
  }
  bundle.aggregates = aggregate(bundle.cells);
  return bundle;
}

}  // namespace

Split split_dataset(std::size_t experiments, const std::array<double, 3>& fractions, std::uint64_t seed) {
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0)) throw InputError("split: fractions must be nonnegative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("split: fractions must sum to 1");
  std::vector<std::size_t> order(experiments);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_stream(seed, kSplitTag);
  // Fisher-Yates with our own index draws so the order does not depend on the
  // standard library's shuffle.
  for (std::size_t i = experiments; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(fractions[0] * static_cast<double>(experiments)));
  const auto n_val = std::min(experiments - std::min(n_train, experiments),
                              static_cast<std::size_t>(std::llround(fractions[1] * static_cast<double>(experiments))));
  const std::size_t n_test = experiments - std::min(n_train, experiments) - n_val;
  if ((fractions[0] > 0 && n_train == 0) || (fractions[1] > 0 && n_val == 0) || (fractions[2] > 0 && n_test == 0) ||
      n_train > experiments) {
    throw InputError("split: too few experiments (" + std::to_string(experiments) + ") for a nonempty partition");
  }
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                      order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return s;
}

ModelConstraints model_constraints(const ModelSpec& model, const Dictionary& dict) {
  ModelConstraints mc;
  switch (model.kind) {
    case ModelKind::Kuramoto:
      if (dict.spec().kind != DictionarySpec::Kind::Monomial) mc.ties = kuramoto_symmetry(dict, model.dim);
      break;
    case ModelKind::FPUT:
      if (dict.spec().kind == DictionarySpec::Kind::Monomial && dict.spec().max_degree >= 3) {
        mc.ties = fput_symmetry(dict, model.dim);
      }
      break;
    case ModelKind::MichaelisMenten:
      mc.generals = mm_conservation(dict);
      break;
    case ModelKind::SpringMass:
      mc.ties = spring_mass_symmetry(dict);
      break;
  }
  return mc;
}

RegressionProblem make_training_problem(const FeatureTargets& raw, Formulation formulation, int order,
                                        const std::vector<TieGroup>& ties, bool normalize, std::optional<double> alpha) {
  RowScales scales{Vector::Ones(raw.A.rows())};
  Matrix A = raw.A;
  if (normalize) {
    scales = pool_tied_scales(compute_row_scales(raw.A), ties);
    A = apply_row_scales(raw.A, scales);
  }
  RegressionProblem p(std::move(A), raw.B, formulation, order, std::move(scales));
  return p.with_radius(alpha ? *alpha : default_radius(p));
}

bool is_constrained_solver(const std::string& name) { return name.size() > 2 && name.ends_with("_c"); }
bool is_tuned_solver(const std::string& name) { return name == "stlsq" || name == "fista"; }

SolveReport run_solver(const std::string& name, const RegressionProblem& p, const SolveSettings& settings,
                       double hyperparameter) {
  if (name == "stlsq") return stlsq_solve(p, hyperparameter);
  if (name == "fista") return fista_solve(p, hyperparameter);
  const Polytope* poly = is_constrained_solver(name) ? settings.constrained : settings.plain;
  std::optional<Polytope> local;
  if (!poly) {
    if (is_constrained_solver(name)) throw InputError(name + ": no constrained polytope available");
    local.emplace(build_polytope(p.radius(), static_cast<int>(p.features()), static_cast<int>(p.outputs()), {}));
    poly = &*local;
  }
  const std::string base = base_name(name);
  const Matrix zero = Matrix::Zero(p.features(), p.outputs());
  SolveReport rep;
  if (base == "bcg") {
    rep = bcg_solve(p, *poly, zero, settings.options);
  } else if (base == "cg") {
    // Feasible start when general constraints exclude vertices: the origin.
    rep = cg_solve(p, *poly, zero, settings.options);
  } else if (base == "fccg") {
    rep = fccg_solve(p, *poly, zero, settings.options);
  } else {
    throw InputError("unknown solver '" + name + "'");
  }
  rep.solver = name;
  return rep;
}

double validation_residual(const Matrix& omega_unscaled, const FeatureTargets& validation) {
  return (validation.B - omega_unscaled.transpose() * validation.A).squaredNorm();
}

TuneResult tune_hyperparameter(const std::string& solver, const std::vector<double>& grid,
                               const RegressionProblem& train, const FeatureTargets& validation,
                               const SolveSettings& settings) {
  if (grid.empty()) throw InputError("tune: empty grid");
  TuneResult out;
  std::optional<double> best_value;
  double best = std::numeric_limits<double>::infinity();
  for (double h : grid) {
    double r = kNaN;
    try {
      const SolveReport rep = run_solver(solver, train, settings, h);
      r = validation_residual(unscale_coefficients(rep.omega, train.scales()), validation);
      if (!std::isfinite(r)) throw SolverError("non-finite validation residual");
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      out.warnings.push_back(solver + " failed at " + format_double(h) + ": " + e.what());
      r = kNaN;
    }
    out.residuals.push_back(r);
    if (std::isnan(r)) continue;
    if (r < best || (r == best && best_value && h < *best_value)) {
      best = r;
      best_value = h;
    }
  }
  if (!best_value) throw SolverError("tune: every grid point failed for " + solver);
  out.value = *best_value;
  return out;
}

ModelSpec repetition_model(const ExperimentConfig& config, std::size_t rep) {
  ModelSpec m = config.model;
  if (m.kind == ModelKind::Kuramoto) m = kuramoto_model(m.dim, m.coupling, m.forcing, derive(config.seed, kRepTag, rep));
  m.validate();
  return m;
}

Dataset clean_dataset(const ExperimentConfig& config, std::size_t rep) {
  return generate_experiments(repetition_model(config, rep), config.experiments, config.points, config.t_max,
                              derive(config.seed, kRepTag, rep), {}, config.integrator_tol);
}

Dataset noisy_dataset(const ExperimentConfig& config, const Dataset& clean, std::size_t eta_index, std::size_t rep) {
  if (eta_index >= config.eta.size()) throw InputError("noise level index out of range");
  return contaminate(clean, config.eta[eta_index], derive(config.seed, kNoiseTag, eta_index, rep));
}

Split repetition_split(const ExperimentConfig& config, std::size_t rep) {
  return split_dataset(config.experiments, config.split, derive(config.seed, kSplitTag, rep));
}

FitOutput fit_single(const ExperimentConfig& config, const Dataset& noisy, const std::string& solver,
                     std::optional<double> hyperparameter) {
  const Dictionary dict = make_dictionary(config.dictionary);
  const Split split = split_dataset(noisy.experiments.size(), config.split, derive(config.seed, kSplitTag, 0));
  const CellInputs in = prepare_cell(config, noisy, dict, split, split.train.size(), is_constrained_solver(solver));
  FitOutput out;
  out.cell = solve_cell(config, dict, in, solver, hyperparameter, &out.report);
  out.cell.eta = noisy.noise_level;
  out.cell.metrics.eta = noisy.noise_level;
  out.cell.samples = split.train.size();
  out.constraints = model_constraints(noisy.model, dict);
  if (out.cell.failed) throw SolverError(solver + ": " + out.cell.error);
  return out;
}

ResultsBundle run_sweep(const ExperimentConfig& config) { return sweep(config, {}, false); }

ResultsBundle sample_efficiency_sweep(const ExperimentConfig& config, const std::vector<std::size_t>& sample_grid) {
  if (sample_grid.empty()) throw InputError("sample sweep: empty sample grid");
  return sweep(config, sample_grid, true);
}

std::vector<AggregateRow> aggregate(const std::vector<CellResult>& cells) {
  using Key = std::tuple<std::string, double, std::size_t>;
  std::map<Key, std::vector<const CellResult*>> groups;
  std::vector<Key> order;
  for (const auto& c : cells) {
    Key k{c.solver, c.eta, c.samples};
    if (!groups.count(k)) order.push_back(k);
    groups[k].push_back(&c);
  }
  std::vector<AggregateRow> out;
  for (const auto& k : order) {
    const auto& g = groups[k];
    AggregateRow row;
    row.solver = std::get<0>(k);
    row.eta = std::get<1>(k);
    row.samples = std::get<2>(k);
    row.formulation = g.front()->formulation;
    std::vector<double> er, ed, et, se, sm, ere, ede, ete;
    for (const CellResult* c : g) {
      if (c->failed) continue;
      er.push_back(c->metrics.recovery);
      ed.push_back(c->metrics.derivative);
      et.push_back(c->metrics.trajectory);
      se.push_back(static_cast<double>(c->metrics.support.extraneous));
      sm.push_back(static_cast<double>(c->metrics.support.missing));
      if (row.eta > 0) {
        ere.push_back(c->metrics.recovery / row.eta);
        ede.push_back(c->metrics.derivative / row.eta);
        ete.push_back(c->metrics.trajectory / row.eta);
      }
    }
    row.count = er.size();
    row.E_R = mean_std(er);
    row.E_D = mean_std(ed);
    row.E_T = mean_std(et);
    row.S_E = mean_std(se);
    row.S_M = mean_std(sm);
    row.E_R_eta = mean_std(ere);
    row.E_D_eta = mean_std(ede);
    row.E_T_eta = mean_std(ete);
    out.push_back(row);
  }
  return out;
}

void write_results(const std::filesystem::path& dir, const ResultsBundle& bundle, const ExperimentConfig& config) {
  const Dictionary dict = make_dictionary(config.dictionary);
  CsvTable results;
  results.header = {"solver", "formulation", "eta", "rep", "E_R", "E_D", "E_T", "S_E", "S_M", "fw_gap", "iters", "seconds"};
  CsvTable failures;
  failures.header = {"solver", "eta", "rep", "error"};
  for (const auto& c : bundle.cells) {
    const double seconds = config.record_wall_time ? c.seconds : 0.0;
    results.rows.push_back({c.solver, to_string(c.formulation), format_double(c.eta), std::to_string(c.rep),
                            format_double(c.metrics.recovery), format_double(c.metrics.derivative),
                            format_double(c.metrics.trajectory),
                            c.failed ? "nan" : std::to_string(c.metrics.support.extraneous),
                            c.failed ? "nan" : std::to_string(c.metrics.support.missing), format_double(c.fw_gap),
                            std::to_string(c.iterations), format_double(seconds)});
    if (c.failed) {
      std::string msg = c.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      failures.rows.push_back({c.solver, format_double(c.eta), std::to_string(c.rep), msg});
      continue;
    }
    Json j = coefficients_to_json(c.omega, dict);
    j["solver"] = c.solver;
    j["formulation"] = to_string(c.formulation);
    j["eta"] = c.eta;
    j["rep"] = c.rep;
    j["hyperparameter"] = c.hyperparameter;
    j["metrics"] = metrics_to_json(c.metrics);
    j["warnings"] = c.warnings;
    write_json(dir / "coefficients" / (c.solver + "_" + format_double(c.eta) + "_" + std::to_string(c.rep) + ".json"), j);
  }
  write_csv(dir / "results.csv", results);
  if (!failures.rows.empty()) write_csv(dir / "failures.csv", failures);

  CsvTable agg;
  agg.header = {"solver", "formulation", "eta", "count"};
  for (const char* m : {"E_R", "E_D", "E_T", "E_R_over_eta", "E_D_over_eta", "E_T_over_eta", "S_E", "S_M"}) {
    agg.header.push_back(std::string(m) + "_mean");
    agg.header.push_back(std::string(m) + "_std");
  }
  for (const auto& a : bundle.aggregates) {
    std::vector<std::string> row{a.solver, to_string(a.formulation), format_double(a.eta), std::to_string(a.count)};
    for (const auto* ms : {&a.E_R, &a.E_D, &a.E_T, &a.E_R_eta, &a.E_D_eta, &a.E_T_eta, &a.S_E, &a.S_M}) {
      row.push_back(format_double((*ms)[0]));
      row.push_back(format_double((*ms)[1]));
    }
    agg.rows.push_back(std::move(row));
  }
  write_csv(dir / "aggregate.csv", agg);
  write_text(dir / "config.ini", format_config(config));
}

void write_sample_efficiency(const std::filesystem::path& dir, const ResultsBundle& bundle) {
  CsvTable t;
  t.header = {"solver", "formulation", "eta", "train_experiments", "count", "E_R_mean", "E_R_std", "S_E_mean",
              "S_E_std", "S_M_mean", "S_M_std"};
  for (const auto& a : bundle.aggregates) {
    t.rows.push_back({a.solver, to_string(a.formulation), format_double(a.eta), std::to_string(a.samples),
                      std::to_string(a.count), format_double(a.E_R[0]), format_double(a.E_R[1]), format_double(a.S_E[0]),
                      format_double(a.S_E[1]), format_double(a.S_M[0]), format_double(a.S_M[1])});
  }
  write_csv(dir / "sample_efficiency.csv", t);
}

Vector sinusoid_initial_state(int d) {
  Vector x(d);
  for (int i = 0; i < d; ++i) x(i) = std::sin(M_PI * (i + 1) / (d + 1));
  return x;
}

SimulationResult simulate_comparison(const Matrix& omega, const ModelSpec& model, const Dictionary& dict,
                                     const Vector& x0, const std::optional<Vector>& v0, double t_max, double dt_out,
                                     double tol) {
  const int d = model.dim;
  if (omega.rows() != dict.size() || omega.cols() != d) throw InputError("simulate: coefficient shape mismatch");
  if (dict.dim() != d) throw InputError("simulate: dictionary dimension mismatch");
  if (!(t_max > 0) || !(dt_out > 0) || dt_out > t_max) throw InputError("simulate: need 0 < dt_out <= t_max");
  const auto steps = static_cast<std::size_t>(std::llround(t_max / dt_out));
  const std::vector<double> grid = linspace(0.0, static_cast<double>(steps) * dt_out, steps + 1);

  const Trajectory truth = integrate_model(model, x0, v0, grid, tol);
  OdeOptions opts;
  opts.tol = tol;
  OdeSolution learned;
  const Matrix omega_t = omega.transpose();
  // States this far out count as a blow-up: the integrator treats NaN as a
  // failed step and stops once the step size underflows.
  const double bound = 1e8 * (1.0 + x0.cwiseAbs().maxCoeff() + (v0 ? v0->cwiseAbs().maxCoeff() : 0.0));
  auto guard = [bound](const Vector& y, Vector& dy) {
    if (!(y.cwiseAbs().maxCoeff() <= bound)) dy.setConstant(std::numeric_limits<double>::quiet_NaN());
  };
  if (model.order() == 1) {
    OdeRhs f = [&](double, const Vector& y, Vector& dy) {
      dy = omega_t * dict.evaluate_point(y);
      guard(y, dy);
    };
    learned = integrate_ode_partial(f, x0, grid, opts);
  } else {
    if (!v0) throw InputError("simulate: second-order model needs an initial velocity");
    Vector y0(2 * d);
    y0 << x0, *v0;
    OdeRhs f = [&](double, const Vector& y, Vector& dy) {
      dy.head(d) = y.tail(d);
      dy.tail(d) = omega_t * dict.evaluate_point(Vector(y.head(d)));
      guard(y, dy);
    };
    learned = integrate_ode_partial(f, y0, grid, opts);
  }
  SimulationResult out;
  const std::size_t k = learned.completed;
  out.t.assign(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(k));
  out.learned = learned.states.topRows(d).leftCols(static_cast<Eigen::Index>(k));
  out.truth = truth.X.leftCols(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    out.divergence.push_back((out.learned.col(static_cast<Eigen::Index>(i)) - out.truth.col(static_cast<Eigen::Index>(i))).norm());
  }
  out.blowup_time = learned.failure_time;
  return out;
}

void write_simulation(const std::filesystem::path& path, const SimulationResult& sim) {
  CsvTable t;
  t.header.push_back("t");
  const auto d = sim.learned.rows();
  for (Eigen::Index i = 0; i < d; ++i) t.header.push_back("learned_" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < d; ++i) t.header.push_back("true_" + std::to_string(i + 1));
  t.header.push_back("divergence");
  for (std::size_t k = 0; k < sim.t.size(); ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    std::vector<std::string> row{format_double(sim.t[k])};
    for (Eigen::Index i = 0; i < d; ++i) row.push_back(format_double(sim.learned(i, c)));
    for (Eigen::Index i = 0; i < d; ++i) row.push_back(format_double(sim.truth(i, c)));
    row.push_back(format_double(sim.divergence[k]));
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
  if (sim.blowup_time) {
    std::filesystem::path note = path;
    note.replace_extension(".blowup");
    write_text(note, format_double(*sim.blowup_time) + "\n");
  }
}

}  // namespace sparsedyn
