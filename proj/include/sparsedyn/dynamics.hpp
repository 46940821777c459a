#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sparsedyn/dictionary.hpp"
#include "sparsedyn/types.hpp"

namespace sparsedyn {

enum class ModelKind { Kuramoto, FPUT, MichaelisMenten, SpringMass };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct ModelSpec {
  ModelKind kind = ModelKind::Kuramoto;
  int dim = 1;
  // Kuramoto
  double coupling = 2.0;
  double forcing = 0.2;
  Vector natural_frequencies;
  // FPUT
  double beta = 0.7;
  // Michaelis-Menten, species ordered (E, S, ES, P)
  double k_f = 0.01;
  double k_r = 1.0;
  double k_cat = 1.0;
  // SpringMass
  double mass = 1.0;
  double k1 = 1.0;
  double k2 = 1.0;
  double k3 = 1.0;

  int order() const { return (kind == ModelKind::FPUT || kind == ModelKind::SpringMass) ? 2 : 1; }
  void validate() const;
};

ModelSpec kuramoto_model(int d, double coupling, double forcing, Vector natural_frequencies);
// Natural frequencies drawn from U[0, 1].
ModelSpec kuramoto_model(int d, double coupling, double forcing, std::uint64_t seed);
ModelSpec fput_model(int d, double beta);
ModelSpec michaelis_menten_model(double k_f, double k_r, double k_cat);
ModelSpec spring_mass_model(double mass, double k1, double k2, double k3);

// First derivative for order-1 models.
Vector rhs(const ModelSpec& model, const Vector& state);
// Acceleration for order-2 models.
Vector rhs(const ModelSpec& model, const Vector& state, const Vector& velocity);

// Xi (n x d) with rhs(x) = Xi^T psi(x). Throws UnrepresentableError when a
// term of the model is missing from the dictionary.
Matrix true_coefficients(const ModelSpec& model, const Dictionary& dict);

struct Trajectory {
  Matrix X;  // d x m
  Matrix V;  // d x m, order-2 models only
};

Trajectory integrate_model(const ModelSpec& model, const Vector& x0, const std::optional<Vector>& v0,
                           const std::vector<double>& t_grid, double tol = 1e-13);

struct Experiment {
  std::vector<double> t;
  Matrix X;  // clean states
  Matrix V;  // clean velocities (order 2), empty otherwise
  Matrix Y;  // noisy states
  Matrix W;  // noisy velocities (order 2), empty otherwise
};

struct Dataset {
  ModelSpec model;
  std::vector<Experiment> experiments;
  double noise_level = 0.0;
  Vector noise_variance;           // biased variance of each state component
  Vector velocity_noise_variance;  // same for velocities (order 2)
  std::uint64_t seed = 0;
  std::uint64_t noise_seed = 0;

  std::size_t points_per_experiment() const { return experiments.empty() ? 0 : experiments.front().t.size(); }
};

struct InitialState {
  Vector x;
  std::optional<Vector> v;
};

using InitialSampler = std::function<InitialState(std::mt19937_64&)>;

// Kuramoto: U[0, 2pi]^d. Michaelis-Menten: U[0, 1]^4. FPUT and SpringMass:
// positions and velocities U[-1, 1]^d.
InitialSampler default_initial_sampler(const ModelSpec& model);

// c experiments of T / c equally spaced samples on [0, t_max]; Y = X.
Dataset generate_experiments(const ModelSpec& model, std::size_t experiments, std::size_t total_points,
                             double t_max, std::uint64_t seed, const InitialSampler& sampler = {},
                             double tol = 1e-13);

// y = x + eta * N(0, Sigma) with Sigma the pooled biased variance of each
// component. Returns a new dataset; clean data is copied unchanged.
Dataset contaminate(const Dataset& clean, double eta, std::uint64_t seed);

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

std::vector<double> linspace(double lo, double hi, std::size_t count);

}  // namespace sparsedyn
