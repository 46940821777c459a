#include "sparsedyn/dynamics.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "sparsedyn/errors.hpp"
#include "sparsedyn/integrator.hpp"

namespace sparsedyn {
namespace {

// Polynomial as exponent vector -> coefficient.
using Poly = std::map<std::vector<int>, double>;

Poly variable(int d, int i) {
  std::vector<int> e(static_cast<std::size_t>(d), 0);
  e[static_cast<std::size_t>(i)] = 1;
  return {{e, 1.0}};
}

Poly add(Poly a, const Poly& b, double scale = 1.0) {
  for (const auto& [e, c] : b) a[e] += scale * c;
  return a;
}

Poly mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) {
      auto e = ea;
      for (std::size_t k = 0; k < e.size(); ++k) e[k] += eb[k];
      out[e] += ca * cb;
    }
  }
  return out;
}

Poly scaled(Poly a, double s) {
  for (auto& [e, c] : a) c *= s;
  return a;
}

// x_i with the fixed-end convention x_0 = x_{d+1} = 0 (0-based i, -1 and d
// are the walls).
Poly displacement(int d, int i) { return (i < 0 || i >= d) ? Poly{} : variable(d, i); }

std::vector<Poly> polynomial_rhs(const ModelSpec& m) {
  const int d = m.dim;
  std::vector<Poly> cols(static_cast<std::size_t>(d));
  switch (m.kind) {
    case ModelKind::FPUT:
      for (int i = 0; i < d; ++i) {
        Poly right = add(displacement(d, i + 1), displacement(d, i), -1.0);
        Poly left = add(displacement(d, i), displacement(d, i - 1), -1.0);
        Poly linear = add(right, left, -1.0);
        Poly cubic = add(mul(mul(right, right), right), mul(mul(left, left), left), -1.0);
        cols[static_cast<std::size_t>(i)] = add(linear, cubic, m.beta);
      }
      break;
    case ModelKind::SpringMass: {
      Poly x1 = variable(d, 0), x2 = variable(d, 1);
      cols[0] = scaled(add(scaled(x1, -m.k1), add(x2, x1, -1.0), m.k2), 1.0 / m.mass);
      cols[1] = scaled(add(scaled(add(x2, x1, -1.0), -m.k2), x2, -m.k3), 1.0 / m.mass);
      break;
    }
    case ModelKind::MichaelisMenten: {
      Poly es = variable(d, 2);
      Poly binding = mul(variable(d, 0), variable(d, 1));
      cols[0] = add(scaled(binding, -m.k_f), es, m.k_r + m.k_cat);
      cols[1] = add(scaled(binding, -m.k_f), es, m.k_r);
      cols[2] = add(scaled(binding, m.k_f), es, -(m.k_r + m.k_cat));
      cols[3] = scaled(es, m.k_cat);
      break;
    }
    case ModelKind::Kuramoto:
      throw InputError("polynomial_rhs: Kuramoto is trigonometric");
  }
  return cols;
}

using TermMap = std::map<std::pair<std::vector<int>, std::vector<int>>, double>;

std::vector<TermMap> kuramoto_terms(const ModelSpec& m) {
  const int d = m.dim;
  const auto ud = static_cast<std::size_t>(d);
  std::vector<TermMap> cols(ud);
  const double k = m.coupling / d;
  for (std::size_t i = 0; i < ud; ++i) {
    std::vector<int> zero(ud, 0);
    cols[i][{zero, zero}] += m.natural_frequencies(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < ud; ++j) {
      // sin(x_j - x_i) = sin(x_j)cos(x_i) - cos(x_j)sin(x_i)
      auto s1 = zero, c1 = zero;
      ++s1[j];
      ++c1[i];
      cols[i][{s1, c1}] += k;
      auto s2 = zero, c2 = zero;
      ++c2[j];
      ++s2[i];
      cols[i][{s2, c2}] -= k;
    }
    auto s = zero;
    s[i] = 1;
    cols[i][{s, zero}] += m.forcing;
  }
  return cols;
}

void check_state(const ModelSpec& model, const Vector& v, const char* what) {
  if (v.size() != model.dim) throw InputError(std::string("rhs: ") + what + " length does not match model dimension");
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Vector biased_variance(const std::vector<Experiment>& exps, Matrix Experiment::*field, int d) {
  Vector mean = Vector::Zero(d), sq = Vector::Zero(d);
  double count = 0;
  for (const auto& e : exps) {
    const Matrix& M = e.*field;
    mean += M.rowwise().sum();
    count += static_cast<double>(M.cols());
  }
  if (count == 0) return Vector::Zero(d);
  mean /= count;
  for (const auto& e : exps) {
    const Matrix& M = e.*field;
    sq += (M.colwise() - mean).rowwise().squaredNorm();
  }
  return sq / count;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Kuramoto:
      return "kuramoto";
    case ModelKind::FPUT:
      return "fput";
    case ModelKind::MichaelisMenten:
      return "mm";
    case ModelKind::SpringMass:
      return "springmass";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "kuramoto") return ModelKind::Kuramoto;
  if (name == "fput") return ModelKind::FPUT;
  if (name == "mm" || name == "michaelis-menten") return ModelKind::MichaelisMenten;
  if (name == "springmass" || name == "spring-mass") return ModelKind::SpringMass;
  throw InputError("unknown model: " + name);
}

void ModelSpec::validate() const {
  if (dim < 1) throw InputError("model dimension must be at least 1");
  if (kind == ModelKind::MichaelisMenten && dim != 4) throw InputError("Michaelis-Menten model has dimension 4");
  if (kind == ModelKind::SpringMass && dim != 2) throw InputError("spring-mass model has dimension 2");
  if (kind == ModelKind::Kuramoto && natural_frequencies.size() != dim) {
    throw InputError("Kuramoto model needs one natural frequency per oscillator");
  }
  if (kind == ModelKind::SpringMass && !(mass > 0)) throw InputError("spring-mass model needs positive mass");
}

ModelSpec kuramoto_model(int d, double coupling, double forcing, Vector natural_frequencies) {
  ModelSpec m;
  m.kind = ModelKind::Kuramoto;
  m.dim = d;
  m.coupling = coupling;
  m.forcing = forcing;
  m.natural_frequencies = std::move(natural_frequencies);
  m.validate();
  return m;
}

ModelSpec kuramoto_model(int d, double coupling, double forcing, std::uint64_t seed) {
  if (d < 1) throw InputError("model dimension must be at least 1");
  auto rng = make_stream(seed, 0x6b75);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector omega(d);
  for (int i = 0; i < d; ++i) omega(i) = u(rng);
  return kuramoto_model(d, coupling, forcing, omega);
}

ModelSpec fput_model(int d, double beta) {
  ModelSpec m;
  m.kind = ModelKind::FPUT;
  m.dim = d;
  m.beta = beta;
  m.validate();
  return m;
}

ModelSpec michaelis_menten_model(double k_f, double k_r, double k_cat) {
  ModelSpec m;
  m.kind = ModelKind::MichaelisMenten;
  m.dim = 4;
  m.k_f = k_f;
  m.k_r = k_r;
  m.k_cat = k_cat;
  m.validate();
  return m;
}

ModelSpec spring_mass_model(double mass, double k1, double k2, double k3) {
  ModelSpec m;
  m.kind = ModelKind::SpringMass;
  m.dim = 2;
  m.mass = mass;
  m.k1 = k1;
  m.k2 = k2;
  m.k3 = k3;
  m.validate();
  return m;
}

Vector rhs(const ModelSpec& model, const Vector& x) {
  check_state(model, x, "state");
  if (model.order() != 1) throw InputError("rhs: second-order model requires a velocity");
  const int d = model.dim;
  Vector dx(d);
  if (model.kind == ModelKind::Kuramoto) {
    const double k = model.coupling / d;
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += std::sin(x(j)) * std::cos(x(i)) - std::cos(x(j)) * std::sin(x(i));
      dx(i) = model.natural_frequencies(i) + k * s + model.forcing * std::sin(x(i));
    }
  } else {
    const double binding = model.k_f * x(0) * x(1);
    dx(0) = -binding + (model.k_r + model.k_cat) * x(2);
    dx(1) = -binding + model.k_r * x(2);
    dx(2) = binding - (model.k_r + model.k_cat) * x(2);
    dx(3) = model.k_cat * x(2);
  }
  return dx;
}

Vector rhs(const ModelSpec& model, const Vector& x, const Vector& v) {
  check_state(model, x, "state");
  check_state(model, v, "velocity");
  if (model.order() != 2) throw InputError("rhs: first-order model takes no velocity");
  const int d = model.dim;
  Vector a(d);
  if (model.kind == ModelKind::FPUT) {
    auto at = [&](int i) { return (i < 0 || i >= d) ? 0.0 : x(i); };
    for (int i = 0; i < d; ++i) {
      const double right = at(i + 1) - at(i);
      const double left = at(i) - at(i - 1);
      a(i) = (right - left) + model.beta * (right * right * right - left * left * left);
    }
  } else {
    a(0) = (-model.k1 * x(0) + model.k2 * (x(1) - x(0))) / model.mass;
    a(1) = (-model.k2 * (x(1) - x(0)) - model.k3 * x(1)) / model.mass;
  }
  return a;
}

Matrix true_coefficients(const ModelSpec& model, const Dictionary& dict) {
  model.validate();
  if (dict.dim() != model.dim) throw InputError("true_coefficients: dictionary dimension mismatch");
  Matrix xi = Matrix::Zero(dict.size(), model.dim);
  auto place = [&](int col, const BasisTag& tag, double c) {
    if (c == 0.0) return;
    auto row = dict.find(tag);
    if (!row) throw UnrepresentableError("model term is not in the dictionary");
    xi(*row, col) += c;
  };
  if (model.kind == ModelKind::Kuramoto) {
    auto cols = kuramoto_terms(model);
    for (int i = 0; i < model.dim; ++i) {
      for (const auto& [key, c] : cols[static_cast<std::size_t>(i)]) place(i, BasisTag::trig(key.first, key.second), c);
    }
  } else {
    auto cols = polynomial_rhs(model);
    for (int i = 0; i < model.dim; ++i) {
      for (const auto& [e, c] : cols[static_cast<std::size_t>(i)]) place(i, BasisTag::monomial(e), c);
    }
  }
  return xi;
}

Trajectory integrate_model(const ModelSpec& model, const Vector& x0, const std::optional<Vector>& v0,
                           const std::vector<double>& t_grid, double tol) {
  model.validate();
  check_state(model, x0, "initial state");
  const int d = model.dim;
  OdeOptions opts;
  opts.tol = tol;
  Trajectory out;
  if (model.order() == 1) {
    if (v0) throw InputError("integrate: first-order model takes no initial velocity");
    OdeRhs f = [&](double, const Vector& y, Vector& dy) { dy = rhs(model, y); };
    out.X = integrate_ode(f, x0, t_grid, opts);
  } else {
    if (!v0) throw InputError("integrate: second-order model needs an initial velocity");
    check_state(model, *v0, "initial velocity");
    Vector y0(2 * d);
    y0 << x0, *v0;
    OdeRhs f = [&](double, const Vector& y, Vector& dy) {
      dy.head(d) = y.tail(d);
      dy.tail(d) = rhs(model, Vector(y.head(d)), Vector(y.tail(d)));
    };
    Matrix states = integrate_ode(f, y0, t_grid, opts);
    out.X = states.topRows(d);
    out.V = states.bottomRows(d);
  }
  return out;
}

InitialSampler default_initial_sampler(const ModelSpec& model) {
  const int d = model.dim;
  switch (model.kind) {
    case ModelKind::Kuramoto:
      return [d](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
        InitialState s{Vector(d), std::nullopt};
        for (int i = 0; i < d; ++i) s.x(i) = u(rng);
        return s;
      };
    case ModelKind::MichaelisMenten:
      return [d](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        InitialState s{Vector(d), std::nullopt};
        for (int i = 0; i < d; ++i) s.x(i) = u(rng);
        return s;
      };
    case ModelKind::FPUT:
    case ModelKind::SpringMass:
      return [d](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        InitialState s{Vector(d), Vector(d)};
        for (int i = 0; i < d; ++i) s.x(i) = u(rng);
        for (int i = 0; i < d; ++i) (*s.v)(i) = u(rng);
        return s;
      };
  }
  throw InputError("unknown model kind");
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  const std::uint64_t parts[4] = {seed, a, b, c};
  std::vector<std::uint32_t> words;
  for (std::uint64_t p : parts) {
    const std::uint64_t h = mix(p);
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
    words.push_back(static_cast<std::uint32_t>(h));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> t(count);
  if (count == 1) {
    t[0] = lo;
    return t;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) t[i] = lo + step * static_cast<double>(i);
  t.back() = hi;
  return t;
}

Dataset generate_experiments(const ModelSpec& model, std::size_t experiments, std::size_t total_points,
                             double t_max, std::uint64_t seed, const InitialSampler& sampler, double tol) {
  model.validate();
  if (experiments == 0) throw InputError("generate: need at least one experiment");
  if (total_points % experiments != 0) throw InputError("generate: experiment count must divide total points");
  const std::size_t m = total_points / experiments;
  if (m < 2) throw InputError("generate: need at least two points per experiment");
  if (!(t_max > 0)) throw InputError("generate: t_max must be positive");
  const InitialSampler draw = sampler ? sampler : default_initial_sampler(model);

  Dataset ds;
  ds.model = model;
  ds.seed = seed;
  ds.noise_variance = Vector::Zero(model.dim);
  if (model.order() == 2) ds.velocity_noise_variance = Vector::Zero(model.dim);
  const std::vector<double> grid = linspace(0.0, t_max, m);
  for (std::size_t e = 0; e < experiments; ++e) {
    auto rng = make_stream(seed, 0x696e6974, e);
    InitialState init = draw(rng);
    Trajectory traj = integrate_model(model, init.x, init.v, grid, tol);
    Experiment ex;
    ex.t = grid;
    ex.X = std::move(traj.X);
    ex.V = std::move(traj.V);
    ex.Y = ex.X;
    ex.W = ex.V;
    ds.experiments.push_back(std::move(ex));
  }
  return ds;
}

Dataset contaminate(const Dataset& clean, double eta, std::uint64_t seed) {
  if (!(eta >= 0)) throw InputError("contaminate: noise level must be nonnegative");
  Dataset out = clean;
  out.noise_level = eta;
  out.noise_seed = seed;
  const int d = clean.model.dim;
  const bool second = clean.model.order() == 2;
  out.noise_variance = biased_variance(clean.experiments, &Experiment::X, d);
  out.velocity_noise_variance = second ? biased_variance(clean.experiments, &Experiment::V, d) : Vector();
  const Vector sx = out.noise_variance.cwiseSqrt() * eta;
  const Vector sv = second ? Vector(out.velocity_noise_variance.cwiseSqrt() * eta) : Vector();
  for (std::size_t e = 0; e < out.experiments.size(); ++e) {
    Experiment& ex = out.experiments[e];
    ex.Y = ex.X;
    ex.W = ex.V;
    if (eta == 0.0) continue;
    auto rng = make_stream(seed, 0x6e6f6973, e);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index j = 0; j < ex.Y.cols(); ++j) {
      for (int k = 0; k < d; ++k) ex.Y(k, j) += sx(k) * normal(rng);
    }
    if (second) {
      for (Eigen::Index j = 0; j < ex.W.cols(); ++j) {
        for (int k = 0; k < d; ++k) ex.W(k, j) += sv(k) * normal(rng);
      }
    }
  }
  return out;
}

}  // namespace sparsedyn
