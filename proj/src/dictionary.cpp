#include "sparsedyn/dictionary.hpp"

#include <cmath>
#include <numeric>
#include <unordered_set>

#include "sparsedyn/errors.hpp"

namespace sparsedyn {
namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int k = 0; k < p; ++k) r *= x;
  return r;
}

Eigen::ArrayXd ipow(const Eigen::ArrayXd& x, int p) {
  Eigen::ArrayXd r = x;
  for (int k = 1; k < p; ++k) r *= x;
  return r;
}

std::string power_suffix(int p) { return p == 1 ? std::string() : "^" + std::to_string(p); }

std::string monomial_label(const std::vector<int>& powers) {
  std::string label;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    if (powers[i] == 0) continue;
    if (!label.empty()) label += "*";
    label += "x_" + std::to_string(i + 1) + power_suffix(powers[i]);
  }
  return label.empty() ? "1" : label;
}

std::string trig_label(const std::vector<int>& s, const std::vector<int>& c) {
  std::string label;
  auto append = [&](const char* fn, std::size_t i, int p) {
    if (!label.empty()) label += "*";
    label += std::string(fn) + "(x_" + std::to_string(i + 1) + ")" + power_suffix(p);
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] > 0) append("sin", i, s[i]);
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] > 0) append("cos", i, c[i]);
  }
  return label.empty() ? "1" : label;
}

void exponents_of_degree(int d, int degree, std::vector<int>& current, int var,
                         std::vector<std::vector<int>>& out) {
  if (var == d - 1) {
    current[static_cast<std::size_t>(var)] = degree;
    out.push_back(current);
    return;
  }
  for (int p = degree; p >= 0; --p) {
    current[static_cast<std::size_t>(var)] = p;
    exponents_of_degree(d, degree - p, current, var + 1, out);
  }
}

void check_dim(int d) {
  if (d < 1) throw InputError("dictionary: dimension must be at least 1");
}

Dictionary trig_dictionary(int d, bool with_squares) {
  check_dim(d);
  const auto ud = static_cast<std::size_t>(d);
  std::vector<BasisTag> tags;
  std::vector<int> zero(ud, 0);
  tags.push_back(BasisTag::trig(zero, zero));
  for (std::size_t i = 0; i < ud; ++i) {
    auto s = zero;
    s[i] = 1;
    tags.push_back(BasisTag::trig(s, zero));
  }
  for (std::size_t i = 0; i < ud; ++i) {
    auto c = zero;
    c[i] = 1;
    tags.push_back(BasisTag::trig(zero, c));
  }
  // Factor f in [0, 2d): f < d is sin(x_{f+1}), otherwise cos(x_{f-d+1}).
  auto add_factor = [&](std::vector<int>& s, std::vector<int>& c, std::size_t f) {
    if (f < ud) {
      ++s[f];
    } else {
      ++c[f - ud];
    }
  };
  for (std::size_t p = 0; p < 2 * ud; ++p) {
    for (std::size_t q = with_squares ? p : p + 1; q < 2 * ud; ++q) {
      auto s = zero, c = zero;
      add_factor(s, c, p);
      add_factor(s, c, q);
      tags.push_back(BasisTag::trig(s, c));
    }
  }
  std::vector<BasisFunction> functions;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    functions.push_back({static_cast<int>(i), trig_label(tags[i].powers, tags[i].cos_powers), tags[i]});
  }
  DictionarySpec spec{with_squares ? DictionarySpec::Kind::TrigWithSquares : DictionarySpec::Kind::TrigPairwise, d, 2};
  return Dictionary(spec, std::move(functions));
}

}  // namespace

BasisTag BasisTag::monomial(std::vector<int> powers) {
  BasisTag t;
  t.family = Family::Monomial;
  t.powers = std::move(powers);
  return t;
}

BasisTag BasisTag::trig(std::vector<int> sin_powers, std::vector<int> cos_powers) {
  BasisTag t;
  t.family = Family::Trig;
  t.powers = std::move(sin_powers);
  t.cos_powers = std::move(cos_powers);
  return t;
}

int BasisTag::degree() const {
  return std::accumulate(powers.begin(), powers.end(), 0) +
         std::accumulate(cos_powers.begin(), cos_powers.end(), 0);
}

bool BasisTag::is_constant() const { return degree() == 0; }

bool BasisTag::matches(const BasisTag& other) const {
  if (is_constant() && other.is_constant()) return true;
  if (family != other.family) return false;
  if (family == Family::Monomial) return powers == other.powers;
  return powers == other.powers && cos_powers == other.cos_powers;
}

double BasisTag::evaluate(const double* x) const {
  double v = 1.0;
  if (family == Family::Monomial) {
    for (std::size_t i = 0; i < powers.size(); ++i) {
      if (powers[i]) v *= ipow(x[i], powers[i]);
    }
  } else {
    for (std::size_t i = 0; i < powers.size(); ++i) {
      if (powers[i]) v *= ipow(std::sin(x[i]), powers[i]);
      if (cos_powers[i]) v *= ipow(std::cos(x[i]), cos_powers[i]);
    }
  }
  return v;
}

Dictionary::Dictionary(DictionarySpec spec, std::vector<BasisFunction> functions)
    : spec_(spec), functions_(std::move(functions)) {
  if (functions_.empty()) throw InputError("dictionary: must contain at least one function");
  std::unordered_set<std::string> labels;
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    if (functions_[i].id != static_cast<int>(i)) throw InputError("dictionary: ids must equal list positions");
    if (!labels.insert(functions_[i].label).second) {
      throw InputError("dictionary: duplicate label " + functions_[i].label);
    }
  }
}

std::optional<int> Dictionary::find(const BasisTag& tag) const {
  for (const auto& f : functions_) {
    if (f.tag.matches(tag)) return f.id;
  }
  return std::nullopt;
}

std::optional<int> Dictionary::find(const std::string& label) const {
  for (const auto& f : functions_) {
    if (f.label == label) return f.id;
  }
  return std::nullopt;
}

Matrix Dictionary::evaluate(const Matrix& X, bool* non_finite) const {
  if (X.rows() != dim()) throw InputError("dictionary evaluate: state dimension mismatch");
  const Eigen::Index m = X.cols();
  Matrix out(size(), m);
  Eigen::ArrayXXd sines, cosines;
  const bool trig = spec_.kind != DictionarySpec::Kind::Monomial;
  if (trig) {
    sines = X.array().sin();
    cosines = X.array().cos();
  }
  for (const auto& f : functions_) {
    Eigen::ArrayXd row = Eigen::ArrayXd::Ones(m);
    for (int i = 0; i < dim(); ++i) {
      const int p = f.tag.powers[static_cast<std::size_t>(i)];
      if (f.tag.family == BasisTag::Family::Monomial) {
        if (p) row *= ipow(Eigen::ArrayXd(X.row(i).transpose().array()), p);
      } else {
        const int q = f.tag.cos_powers[static_cast<std::size_t>(i)];
        if (p) row *= ipow(Eigen::ArrayXd(sines.row(i).transpose()), p);
        if (q) row *= ipow(Eigen::ArrayXd(cosines.row(i).transpose()), q);
      }
    }
    out.row(f.id) = row.transpose().matrix();
  }
  if (non_finite) *non_finite = !out.allFinite();
  return out;
}

Vector Dictionary::evaluate_point(const Vector& x) const {
  if (x.size() != dim()) throw InputError("dictionary evaluate: state dimension mismatch");
  Vector out(size());
  for (const auto& f : functions_) out(f.id) = f.tag.evaluate(x.data());
  return out;
}

Dictionary monomial_dictionary(int d, int max_degree) {
  check_dim(d);
  if (max_degree < 0) throw InputError("monomial dictionary: degree must be nonnegative");
  std::vector<std::vector<int>> exps;
  std::vector<int> current(static_cast<std::size_t>(d), 0);
  for (int deg = 0; deg <= max_degree; ++deg) exponents_of_degree(d, deg, current, 0, exps);
  std::vector<BasisFunction> functions;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    functions.push_back({static_cast<int>(i), monomial_label(exps[i]), BasisTag::monomial(exps[i])});
  }
  return Dictionary({DictionarySpec::Kind::Monomial, d, max_degree}, std::move(functions));
}

Dictionary trig_pairwise_dictionary(int d) { return trig_dictionary(d, false); }

Dictionary trig_dictionary_with_squares(int d) { return trig_dictionary(d, true); }

Dictionary make_dictionary(const DictionarySpec& spec) {
  switch (spec.kind) {
    case DictionarySpec::Kind::Monomial:
      return monomial_dictionary(spec.dim, spec.max_degree);
    case DictionarySpec::Kind::TrigPairwise:
      return trig_pairwise_dictionary(spec.dim);
    case DictionarySpec::Kind::TrigWithSquares:
      return trig_dictionary_with_squares(spec.dim);
  }
  throw InputError("unknown dictionary kind");
}

RowScales compute_row_scales(const Matrix& features) {
  if (features.cols() == 0) throw InputError("row_normalize: no columns");
  RowScales s;
  s.scales.resize(features.rows());
  const double m = static_cast<double>(features.cols());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    if (features.row(i).maxCoeff() == features.row(i).minCoeff()) {
      s.scales(i) = 1.0;
      continue;
    }
    const double mean = features.row(i).sum() / m;
    const double var = (features.row(i).array() - mean).square().sum() / m;
    const double sd = std::sqrt(var);
    s.scales(i) = (sd > 0.0 && std::isfinite(sd)) ? sd : 1.0;
  }
  return s;
}

Matrix apply_row_scales(const Matrix& features, const RowScales& scales) {
  if (scales.scales.size() != features.rows()) throw InputError("row scales: length mismatch");
  return scales.scales.cwiseInverse().asDiagonal() * features;
}

NormalizedFeatures row_normalize(const Matrix& features) {
  NormalizedFeatures out;
  out.scales = compute_row_scales(features);
  out.values = apply_row_scales(features, out.scales);
  return out;
}

Matrix unscale_coefficients(const Matrix& omega_scaled, const RowScales& scales) {
  if (scales.scales.size() != omega_scaled.rows()) throw InputError("unscale: length mismatch");
  return scales.scales.cwiseInverse().asDiagonal() * omega_scaled;
}

}  // namespace sparsedyn
