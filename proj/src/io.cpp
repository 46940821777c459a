#include "sparsedyn/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sparsedyn/errors.hpp"

namespace sparsedyn {
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string kind_name(DictionarySpec::Kind k) {
  switch (k) {
    case DictionarySpec::Kind::Monomial:
      return "monomial";
    case DictionarySpec::Kind::TrigPairwise:
      return "trig";
    case DictionarySpec::Kind::TrigWithSquares:
      return "trig_squares";
  }
  return "monomial";
}

std::string column_name(char prefix, int i) { return std::string(1, prefix) + "_" + std::to_string(i + 1); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw InputError("not a number: '" + text + "'");
  return v;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_csv(const fs::path& path, const CsvTable& table) {
  std::string text;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text += ',';
      text += cells[i];
    }
    text += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  write_text(path, text);
}

CsvTable read_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty csv: " + path.string());
  t.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != t.header.size()) throw InputError("ragged csv row in " + path.string());
    t.rows.push_back(std::move(cells));
  }
  return t;
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    throw InputError("bad json in " + path.string() + ": " + e.what());
  }
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  std::string text;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) text += ',';
      text += format_double(m(i, j));
    }
    text += '\n';
  }
  write_text(path, text);
}

Matrix read_matrix_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> r;
    for (const auto& c : split_line(line)) r.push_back(parse_double(c));
    if (!rows.empty() && r.size() != rows.front().size()) throw InputError("ragged matrix in " + path.string());
    rows.push_back(std::move(r));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix matrix_from_json(const Json& j) {
  Matrix m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const Json& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != m.rows()) throw InputError("matrix json: row count mismatch");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Json& r = data.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(r.size()) != m.cols()) throw InputError("matrix json: column count mismatch");
    for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = r.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

Json model_to_json(const ModelSpec& model) {
  Json j{{"kind", to_string(model.kind)}, {"dim", model.dim}};
  switch (model.kind) {
    case ModelKind::Kuramoto: {
      j["coupling"] = model.coupling;
      j["forcing"] = model.forcing;
      std::vector<double> w(model.natural_frequencies.data(),
                            model.natural_frequencies.data() + model.natural_frequencies.size());
      j["natural_frequencies"] = w;
      break;
    }
    case ModelKind::FPUT:
      j["beta"] = model.beta;
      break;
    case ModelKind::MichaelisMenten:
      j["k_f"] = model.k_f;
      j["k_r"] = model.k_r;
      j["k_cat"] = model.k_cat;
      break;
    case ModelKind::SpringMass:
      j["mass"] = model.mass;
      j["k1"] = model.k1;
      j["k2"] = model.k2;
      j["k3"] = model.k3;
      break;
  }
  return j;
}

ModelSpec model_from_json(const Json& j) {
  try {
    const ModelKind kind = model_kind_from_string(j.at("kind").get<std::string>());
    const int dim = j.at("dim").get<int>();
    ModelSpec m;
    switch (kind) {
      case ModelKind::Kuramoto: {
        auto w = j.at("natural_frequencies").get<std::vector<double>>();
        m = kuramoto_model(dim, j.at("coupling").get<double>(), j.at("forcing").get<double>(),
                           Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size())));
        break;
      }
      case ModelKind::FPUT:
        m = fput_model(dim, j.at("beta").get<double>());
        break;
      case ModelKind::MichaelisMenten:
        m = michaelis_menten_model(j.at("k_f").get<double>(), j.at("k_r").get<double>(), j.at("k_cat").get<double>());
        break;
      case ModelKind::SpringMass:
        m = spring_mass_model(j.at("mass").get<double>(), j.at("k1").get<double>(), j.at("k2").get<double>(),
                              j.at("k3").get<double>());
        break;
    }
    return m;
  } catch (const Json::exception& e) {
    throw InputError(std::string("model json: ") + e.what());
  }
}

Json dictionary_spec_to_json(const DictionarySpec& spec) {
  Json j{{"kind", kind_name(spec.kind)}, {"dim", spec.dim}};
  if (spec.kind == DictionarySpec::Kind::Monomial) j["max_degree"] = spec.max_degree;
  return j;
}

DictionarySpec dictionary_spec_from_json(const Json& j) {
  DictionarySpec s;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "monomial") {
    s.kind = DictionarySpec::Kind::Monomial;
    s.max_degree = j.at("max_degree").get<int>();
  } else if (kind == "trig") {
    s.kind = DictionarySpec::Kind::TrigPairwise;
  } else if (kind == "trig_squares") {
    s.kind = DictionarySpec::Kind::TrigWithSquares;
  } else {
    throw InputError("unknown dictionary kind: " + kind);
  }
  s.dim = j.at("dim").get<int>();
  return s;
}

Json dictionary_to_json(const Dictionary& dict) {
  Json list = Json::array();
  for (const auto& f : dict.functions()) {
    Json tags{{"family", f.tag.family == BasisTag::Family::Monomial ? "monomial" : "trig"}};
    if (f.tag.family == BasisTag::Family::Monomial) {
      tags["powers"] = f.tag.powers;
    } else {
      tags["sin_powers"] = f.tag.powers;
      tags["cos_powers"] = f.tag.cos_powers;
    }
    list.push_back({{"id", f.id}, {"label", f.label}, {"tags", std::move(tags)}});
  }
  return {{"spec", dictionary_spec_to_json(dict.spec())}, {"functions", std::move(list)}};
}

void save_dataset(const fs::path& dir, const Dataset& data) {
  fs::create_directories(dir);
  const bool second = data.model.order() == 2;
  const int d = data.model.dim;
  auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  Json manifest{{"model", model_to_json(data.model)},
                {"noise_level", data.noise_level},
                {"seed", data.seed},
                {"noise_seed", data.noise_seed},
                {"noise_variance", vec(data.noise_variance)},
                {"velocity_noise_variance", vec(data.velocity_noise_variance)},
                {"experiments", data.experiments.size()},
                {"points_per_experiment", data.points_per_experiment()}};
  if (!data.experiments.empty() && !data.experiments.front().t.empty()) manifest["t_max"] = data.experiments.front().t.back();
  write_json(dir / "dataset.json", manifest);

  for (std::size_t k = 0; k < data.experiments.size(); ++k) {
    const Experiment& e = data.experiments[k];
    CsvTable t;
    t.header.push_back("t");
    for (int i = 0; i < d; ++i) t.header.push_back(column_name('x', i));
    if (second) for (int i = 0; i < d; ++i) t.header.push_back(column_name('v', i));
    for (int i = 0; i < d; ++i) t.header.push_back(column_name('y', i));
    if (second) for (int i = 0; i < d; ++i) t.header.push_back(column_name('w', i));
    for (std::size_t s = 0; s < e.t.size(); ++s) {
      const auto c = static_cast<Eigen::Index>(s);
      std::vector<std::string> row{format_double(e.t[s])};
      for (int i = 0; i < d; ++i) row.push_back(format_double(e.X(i, c)));
      if (second) for (int i = 0; i < d; ++i) row.push_back(format_double(e.V(i, c)));
      for (int i = 0; i < d; ++i) row.push_back(format_double(e.Y(i, c)));
      if (second) for (int i = 0; i < d; ++i) row.push_back(format_double(e.W(i, c)));
      t.rows.push_back(std::move(row));
    }
    write_csv(dir / ("experiment_" + std::to_string(k) + ".csv"), t);
  }
}

Dataset load_dataset(const fs::path& dir) {
  const Json manifest = read_json(dir / "dataset.json");
  Dataset data;
  data.model = model_from_json(manifest.at("model"));
  data.noise_level = manifest.at("noise_level").get<double>();
  data.seed = manifest.at("seed").get<std::uint64_t>();
  data.noise_seed = manifest.at("noise_seed").get<std::uint64_t>();
  auto vec = [](const Json& j) {
    auto v = j.get<std::vector<double>>();
    return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  data.noise_variance = vec(manifest.at("noise_variance"));
  data.velocity_noise_variance = vec(manifest.at("velocity_noise_variance"));
  const auto count = manifest.at("experiments").get<std::size_t>();
  const bool second = data.model.order() == 2;
  const int d = data.model.dim;
  const std::size_t expected_cols = 1 + static_cast<std::size_t>(d) * (second ? 4 : 2);
  for (std::size_t k = 0; k < count; ++k) {
    const CsvTable t = read_csv(dir / ("experiment_" + std::to_string(k) + ".csv"));
    if (t.header.size() != expected_cols) throw InputError("experiment csv has the wrong number of columns");
    const auto m = static_cast<Eigen::Index>(t.rows.size());
    Experiment e;
    e.X.resize(d, m);
    e.Y.resize(d, m);
    if (second) {
      e.V.resize(d, m);
      e.W.resize(d, m);
    }
    for (Eigen::Index s = 0; s < m; ++s) {
      const auto& row = t.rows[static_cast<std::size_t>(s)];
      std::size_t c = 0;
      e.t.push_back(parse_double(row[c++]));
      for (int i = 0; i < d; ++i) e.X(i, s) = parse_double(row[c++]);
      if (second) for (int i = 0; i < d; ++i) e.V(i, s) = parse_double(row[c++]);
      for (int i = 0; i < d; ++i) e.Y(i, s) = parse_double(row[c++]);
      if (second) for (int i = 0; i < d; ++i) e.W(i, s) = parse_double(row[c++]);
    }
    data.experiments.push_back(std::move(e));
  }
  return data;
}

Json constraints_to_json(const Dictionary& dict, const std::vector<TieGroup>& ties,
                         const std::vector<LinearConstraint>& generals) {
  Json jt = Json::array();
  for (const auto& g : ties) {
    Json members = Json::array();
    for (const auto& m : g.members) {
      members.push_back({{"label", dict[m.row].label}, {"column", m.col}, {"sign", m.sign}});
    }
    jt.push_back(std::move(members));
  }
  Json jg = Json::array();
  for (const auto& c : generals) {
    jg.push_back({{"relation", to_string(c.relation)}, {"rhs", c.rhs}, {"coefficients", matrix_to_json(c.coefficients)}});
  }
  return {{"ties", std::move(jt)}, {"generals", std::move(jg)}};
}

void constraints_from_json(const Json& j, const Dictionary& dict, std::vector<TieGroup>& ties,
                           std::vector<LinearConstraint>& generals) {
  ties.clear();
  generals.clear();
  for (const auto& group : j.at("ties")) {
    TieGroup g;
    for (const auto& m : group) {
      const std::string label = m.at("label").get<std::string>();
      auto row = dict.find(label);
      if (!row) throw ConstraintError("constraint refers to unknown basis function " + label);
      g.members.push_back({*row, m.at("column").get<int>(), m.at("sign").get<int>()});
    }
    ties.push_back(std::move(g));
  }
  for (const auto& c : j.at("generals")) {
    const std::string rel = c.at("relation").get<std::string>();
    if (rel != "eq" && rel != "le") throw ConstraintError("unknown relation " + rel);
    generals.push_back({matrix_from_json(c.at("coefficients")), c.at("rhs").get<double>(),
                        rel == "eq" ? Relation::Eq : Relation::Le});
  }
}

void save_problem(const fs::path& dir, const RegressionProblem& p) {
  fs::create_directories(dir);
  const Vector& s = p.scales().scales;
  Json header{{"formulation", to_string(p.formulation())},
              {"ode_order", p.ode_order()},
              {"radius", p.radius()},
              {"features", p.features()},
              {"outputs", p.outputs()},
              {"samples", p.samples()},
              {"scales", std::vector<double>(s.data(), s.data() + s.size())},
              {"A", "A.csv"},
              {"B", "B.csv"}};
  write_json(dir / "problem.json", header);
  write_matrix_csv(dir / "A.csv", p.A());
  write_matrix_csv(dir / "B.csv", p.B());
}

RegressionProblem load_problem(const fs::path& dir) {
  const Json h = read_json(dir / "problem.json");
  Matrix A = read_matrix_csv(dir / h.at("A").get<std::string>());
  Matrix B = read_matrix_csv(dir / h.at("B").get<std::string>());
  if (A.rows() != h.at("features").get<Eigen::Index>() || B.rows() != h.at("outputs").get<Eigen::Index>() ||
      A.cols() != B.cols()) {
    throw InputError("problem snapshot: block shapes do not match the header");
  }
  auto s = h.at("scales").get<std::vector<double>>();
  RowScales scales{Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size()))};
  RegressionProblem p(std::move(A), std::move(B), formulation_from_string(h.at("formulation").get<std::string>()),
                      h.at("ode_order").get<int>(), std::move(scales));
  return p.with_radius(h.at("radius").get<double>());
}

Json report_to_json(const SolveReport& r) {
  Json objective = Json::array(), gap = Json::array(), vertices = Json::array(), seconds = Json::array();
  for (const auto& rec : r.trace) {
    objective.push_back(rec.objective);
    gap.push_back(rec.gap);
    vertices.push_back(rec.vertices);
    seconds.push_back(rec.seconds);
  }
  return {{"solver", r.solver},
          {"hyperparameter", r.hyperparameter},
          {"iterations", r.iterations},
          {"fw_gap", std::isfinite(r.fw_gap) ? Json(r.fw_gap) : Json(nullptr)},
          {"converged", r.converged},
          {"vertex_count", r.vertex_count},
          {"clipped_steps", r.clipped_steps},
          {"clipped_iterations", r.clipped_iterations},
          {"seconds", r.seconds},
          {"warnings", r.warnings},
          {"trace", {{"objective", std::move(objective)}, {"gap", std::move(gap)}, {"vertices", std::move(vertices)},
                     {"seconds", std::move(seconds)}}}};
}

Json metrics_to_json(const MetricReport& m) {
  Json j{{"eta", m.eta},
         {"E_R", m.recovery},
         {"E_D", m.derivative},
         {"E_T", m.trajectory},
         {"S_E", m.support.extraneous},
         {"S_M", m.support.missing}};
  if (m.eta > 0) {
    j["E_R_over_eta"] = m.recovery / m.eta;
    j["E_D_over_eta"] = m.derivative / m.eta;
    j["E_T_over_eta"] = m.trajectory / m.eta;
  }
  return j;
}

Json coefficients_to_json(const Matrix& omega, const Dictionary& dict) {
  if (omega.rows() != dict.size()) throw InputError("coefficients: row count does not match the dictionary");
  Json entries = Json::array();
  for (Eigen::Index j = 0; j < omega.cols(); ++j) {
    for (Eigen::Index i = 0; i < omega.rows(); ++i) {
      if (omega(i, j) == 0.0) continue;
      entries.push_back({{"output", static_cast<int>(j) + 1},
                         {"label", dict[static_cast<int>(i)].label},
                         {"value", omega(i, j)}});
    }
  }
  return {{"dictionary", dictionary_spec_to_json(dict.spec())},
          {"rows", omega.rows()},
          {"cols", omega.cols()},
          {"nonzeros", std::move(entries)}};
}

Matrix coefficients_from_json(const Json& j, const Dictionary& dict) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows != dict.size()) throw InputError("coefficients: row count does not match the dictionary");
  Matrix omega = Matrix::Zero(rows, cols);
  for (const auto& e : j.at("nonzeros")) {
    const std::string label = e.at("label").get<std::string>();
    auto r = dict.find(label);
    if (!r) throw InputError("coefficients: unknown basis function " + label);
    const int c = e.at("output").get<int>() - 1;
    if (c < 0 || c >= cols) throw InputError("coefficients: output index out of range");
    omega(*r, c) = e.at("value").get<double>();
  }
  return omega;
}

}  // namespace sparsedyn
