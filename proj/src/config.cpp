#include "sparsedyn/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sparsedyn/errors.hpp"
#include "sparsedyn/io.hpp"

namespace sparsedyn {
namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> kKnownKeys{
    {"model", {"kind", "dim", "coupling", "forcing", "beta", "k_f", "k_r", "k_cat", "mass", "k1", "k2", "k3"}},
    {"dictionary", {"kind", "max_degree"}},
    {"data", {"experiments", "points", "t_max", "integrator_tol"}},
    {"problem", {"formulation", "derivative", "degree", "window", "quadrature", "targets", "normalize"}},
    {"solver", {"alpha", "gap_tolerance", "max_iterations", "subproblem_max_iterations", "conservation_eps"}},
    {"sweep",
     {"solvers", "eta", "repetitions", "split", "stlsq_grid", "fista_grid", "sample_grid", "seed", "output",
      "record_wall_time"}},
};

std::vector<std::string> list_items(const std::string& raw) {
  std::string s = boost::algorithm::trim_copy(raw);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::vector<std::string> parts;
  boost::algorithm::split(parts, s, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (p.size() >= 2 && p.front() == '"' && p.back() == '"') p = p.substr(1, p.size() - 2);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::string scalar(const std::string& raw) {
  std::string s = boost::algorithm::trim_copy(raw);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    return parse_double(scalar(v));
  } catch (const InputError&) {
    throw InputError("config: " + key + " is not a number: " + v);
  }
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (!(x >= 0) || x != std::floor(x) || x > 1e15) throw InputError("config: " + key + " must be a nonnegative integer");
  return static_cast<std::size_t>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string s = boost::algorithm::to_lower_copy(scalar(v));
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InputError("config: " + key + " must be true or false");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : list_items(v)) out.push_back(to_double(key, item));
  return out;
}

TargetSource targets_from_string(const std::string& s) {
  if (s == "estimated") return TargetSource::Estimated;
  if (s == "observed_velocity") return TargetSource::ObservedVelocity;
  if (s == "exact") return TargetSource::Exact;
  throw InputError("config: unknown targets '" + s + "'");
}

std::string to_string(TargetSource t) {
  switch (t) {
    case TargetSource::Estimated:
      return "estimated";
    case TargetSource::ObservedVelocity:
      return "observed_velocity";
    case TargetSource::Exact:
      return "exact";
  }
  return "estimated";
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_same_v<T, double>) {
      s += format_double(v[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      s += v[i];
    } else {
      s += std::to_string(v[i]);
    }
  }
  return s + "]";
}

}  // namespace

std::vector<double> logspace(double lo, double hi, std::size_t count) {
  if (!(lo > 0 && hi > 0)) throw InputError("logspace: bounds must be positive");
  std::vector<double> out;
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    const double e = count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(std::pow(10.0, e));
  }
  return out;
}

ExperimentConfig default_config(ModelKind kind, int dim) {
  ExperimentConfig c;
  c.stlsq_grid = logspace(1e-6, 1e1, 15);
  c.fista_grid = logspace(1e-8, 1e1, 19);
  switch (kind) {
    case ModelKind::Kuramoto:
      c.model = kuramoto_model(dim, 2.0, 0.2, Vector::Zero(dim));
      c.dictionary = {DictionarySpec::Kind::TrigPairwise, dim, 0};
      c.experiments = 40;
      c.points = 6000;
      c.t_max = 10.0;
      break;
    case ModelKind::FPUT:
      c.model = fput_model(dim, 0.7);
      c.dictionary = {DictionarySpec::Kind::Monomial, dim, 3};
      c.experiments = 150;
      c.points = 900 * static_cast<std::size_t>(dim);
      c.t_max = 1.0;
      break;
    case ModelKind::MichaelisMenten:
      if (dim != 4) throw InputError("the Michaelis-Menten model has four species");
      c.model = michaelis_menten_model(0.01, 1.0, 1.0);
      c.dictionary = {DictionarySpec::Kind::Monomial, 4, 2};
      c.experiments = 150;
      c.points = 6000;
      c.t_max = 0.01;
      break;
    case ModelKind::SpringMass:
      if (dim != 2) throw InputError("the spring-mass model has two masses");
      c.model = spring_mass_model(1.0, 1.0, 1.0, 1.0);
      c.dictionary = {DictionarySpec::Kind::Monomial, 2, 1};
      c.experiments = 20;
      c.points = 2000;
      c.t_max = 10.0;
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (model.dim != dictionary.dim) throw InputError("config: dictionary dimension differs from the model");
  if (experiments == 0 || points == 0 || points % experiments != 0) {
    throw InputError("config: points must be a positive multiple of experiments");
  }
  if (!(t_max > 0)) throw InputError("config: t_max must be positive");
  if (solvers.empty()) throw InputError("config: no solvers selected");
  if (eta.empty()) throw InputError("config: eta grid is empty");
  for (double e : eta) {
    if (!(e >= 0) || !std::isfinite(e)) throw InputError("config: eta values must be finite and nonnegative");
  }
  if (repetitions == 0) throw InputError("config: repetitions must be positive");
  double total = 0;
  for (double f : split) {
    if (!(f >= 0)) throw InputError("config: split fractions must be nonnegative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("config: split fractions must sum to 1");
  for (const auto& s : solvers) {
    static const std::set<std::string> known{"bcg", "bcg_c", "cg", "cg_c", "fccg", "fccg_c", "stlsq", "fista"};
    if (!known.count(s)) throw InputError("config: unknown solver '" + s + "'");
    if (s == "stlsq" && stlsq_grid.empty()) throw InputError("config: stlsq grid is empty");
    if (s == "fista" && fista_grid.empty()) throw InputError("config: fista grid is empty");
  }
  if (alpha && !(*alpha > 0)) throw InputError("config: alpha must be positive");
  if (conservation_eps && !(*conservation_eps >= 0)) throw InputError("config: conservation_eps must be nonnegative");
  problem.estimator.validate();
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    auto known = kKnownKeys.find(section);
    if (known == kKnownKeys.end()) {
      throw InputError(body.empty() ? "config: keys must be inside a section: " + section
                                    : "config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      (void)value;
      if (!known->second.count(key)) throw InputError("config: unknown key " + section + "." + key);
    }
  }
  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(path)) return *v;
    return std::nullopt;
  };

  auto kind_text = get("model.kind");
  auto dim_text = get("model.dim");
  if (!kind_text || !dim_text) throw InputError("config: model.kind and model.dim are required");
  const ModelKind kind = model_kind_from_string(scalar(*kind_text));
  const int dim = static_cast<int>(to_count("model.dim", *dim_text));
  ExperimentConfig c = default_config(kind, dim);

  auto num = [&](const std::string& path, double& target) {
    if (auto v = get(path)) target = to_double(path, *v);
  };
  auto count = [&](const std::string& path, std::size_t& target) {
    if (auto v = get(path)) target = to_count(path, *v);
  };

  num("model.coupling", c.model.coupling);
  num("model.forcing", c.model.forcing);
  num("model.beta", c.model.beta);
  num("model.k_f", c.model.k_f);
  num("model.k_r", c.model.k_r);
  num("model.k_cat", c.model.k_cat);
  num("model.mass", c.model.mass);
  num("model.k1", c.model.k1);
  num("model.k2", c.model.k2);
  num("model.k3", c.model.k3);

  if (auto v = get("dictionary.kind")) {
    const std::string k = scalar(*v);
    if (k == "monomial") {
      c.dictionary.kind = DictionarySpec::Kind::Monomial;
    } else if (k == "trig") {
      c.dictionary.kind = DictionarySpec::Kind::TrigPairwise;
    } else if (k == "trig_squares") {
      c.dictionary.kind = DictionarySpec::Kind::TrigWithSquares;
    } else {
      throw InputError("config: unknown dictionary kind '" + k + "'");
    }
  }
  if (auto v = get("dictionary.max_degree")) c.dictionary.max_degree = static_cast<int>(to_count("dictionary.max_degree", *v));

  count("data.experiments", c.experiments);
  count("data.points", c.points);
  num("data.t_max", c.t_max);
  num("data.integrator_tol", c.integrator_tol);

  if (auto v = get("problem.formulation")) c.problem.formulation = formulation_from_string(scalar(*v));
  if (auto v = get("problem.derivative")) c.problem.estimator.method = diff_method_from_string(scalar(*v));
  if (auto v = get("problem.degree")) c.problem.estimator.degree = static_cast<int>(to_count("problem.degree", *v));
  if (auto v = get("problem.window")) c.problem.estimator.window = static_cast<int>(to_count("problem.window", *v));
  if (auto v = get("problem.quadrature")) c.problem.estimator.quadrature = quadrature_from_string(scalar(*v));
  if (auto v = get("problem.targets")) c.problem.targets = targets_from_string(scalar(*v));
  if (auto v = get("problem.normalize")) c.problem.normalize = to_bool("problem.normalize", *v);

  if (auto v = get("solver.alpha")) c.alpha = to_double("solver.alpha", *v);
  num("solver.gap_tolerance", c.gap_tolerance);
  count("solver.max_iterations", c.max_iterations);
  count("solver.subproblem_max_iterations", c.subproblem_max_iterations);
  if (auto v = get("solver.conservation_eps")) c.conservation_eps = to_double("solver.conservation_eps", *v);

  if (auto v = get("sweep.solvers")) c.solvers = list_items(*v);
  if (auto v = get("sweep.eta")) c.eta = to_doubles("sweep.eta", *v);
  count("sweep.repetitions", c.repetitions);
  if (auto v = get("sweep.split")) {
    auto s = to_doubles("sweep.split", *v);
    if (s.size() != 3) throw InputError("config: split needs three fractions");
    c.split = {s[0], s[1], s[2]};
  }
  if (auto v = get("sweep.stlsq_grid")) c.stlsq_grid = to_doubles("sweep.stlsq_grid", *v);
  if (auto v = get("sweep.fista_grid")) c.fista_grid = to_doubles("sweep.fista_grid", *v);
  if (auto v = get("sweep.sample_grid")) {
    c.sample_grid.clear();
    for (const auto& item : list_items(*v)) c.sample_grid.push_back(to_count("sweep.sample_grid", item));
  }
  if (auto v = get("sweep.seed")) c.seed = to_count("sweep.seed", *v);
  if (auto v = get("sweep.output")) c.output = scalar(*v);
  if (auto v = get("sweep.record_wall_time")) c.record_wall_time = to_bool("sweep.record_wall_time", *v);

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_text(path)); }

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "[model]\nkind = " << to_string(c.model.kind) << "\ndim = " << c.model.dim << "\n";
  switch (c.model.kind) {
    case ModelKind::Kuramoto:
      o << "coupling = " << format_double(c.model.coupling) << "\nforcing = " << format_double(c.model.forcing) << "\n";
      break;
    case ModelKind::FPUT:
      o << "beta = " << format_double(c.model.beta) << "\n";
      break;
    case ModelKind::MichaelisMenten:
      o << "k_f = " << format_double(c.model.k_f) << "\nk_r = " << format_double(c.model.k_r)
        << "\nk_cat = " << format_double(c.model.k_cat) << "\n";
      break;
    case ModelKind::SpringMass:
      o << "mass = " << format_double(c.model.mass) << "\nk1 = " << format_double(c.model.k1)
        << "\nk2 = " << format_double(c.model.k2) << "\nk3 = " << format_double(c.model.k3) << "\n";
      break;
  }
  o << "\n[dictionary]\nkind = " << dictionary_spec_to_json(c.dictionary).at("kind").get<std::string>() << "\n";
  if (c.dictionary.kind == DictionarySpec::Kind::Monomial) o << "max_degree = " << c.dictionary.max_degree << "\n";
  o << "\n[data]\nexperiments = " << c.experiments << "\npoints = " << c.points << "\nt_max = " << format_double(c.t_max)
    << "\nintegrator_tol = " << format_double(c.integrator_tol) << "\n";
  o << "\n[problem]\nformulation = " << to_string(c.problem.formulation)
    << "\nderivative = " << to_string(c.problem.estimator.method) << "\ndegree = " << c.problem.estimator.degree
    << "\nwindow = " << c.problem.estimator.window << "\nquadrature = " << to_string(c.problem.estimator.quadrature)
    << "\ntargets = " << to_string(c.problem.targets) << "\nnormalize = " << (c.problem.normalize ? "true" : "false")
    << "\n";
  o << "\n[solver]\n";
  if (c.alpha) o << "alpha = " << format_double(*c.alpha) << "\n";
  o << "gap_tolerance = " << format_double(c.gap_tolerance) << "\nmax_iterations = " << c.max_iterations
    << "\nsubproblem_max_iterations = " << c.subproblem_max_iterations << "\n";
  if (c.conservation_eps) o << "conservation_eps = " << format_double(*c.conservation_eps) << "\n";
  o << "\n[sweep]\nsolvers = " << join(c.solvers) << "\neta = " << join(c.eta) << "\nrepetitions = " << c.repetitions
    << "\nsplit = " << join(std::vector<double>(c.split.begin(), c.split.end()))
    << "\nstlsq_grid = " << join(c.stlsq_grid) << "\nfista_grid = " << join(c.fista_grid) << "\n";
  if (!c.sample_grid.empty()) o << "sample_grid = " << join(c.sample_grid) << "\n";
  o << "seed = " << c.seed << "\noutput = " << c.output.string()
    << "\nrecord_wall_time = " << (c.record_wall_time ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace sparsedyn
