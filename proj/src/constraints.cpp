#include "sparsedyn/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sparsedyn/errors.hpp"

namespace sparsedyn {
namespace {

class SignedUnionFind {
 public:
  explicit SignedUnionFind(std::size_t n) : parent_(n), parity_(n, 1) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
  }

  // Root of x and the sign s with value(x) = s * value(root).
  std::pair<std::size_t, int> find(std::size_t x) {
    int s = 1;
    std::size_t r = x;
    while (parent_[r] != r) {
      s *= parity_[r];
      r = parent_[r];
    }
    // Path compression.
    std::size_t cur = x;
    int cs = s;
    while (parent_[cur] != cur) {
      std::size_t next = parent_[cur];
      int next_s = cs * parity_[cur];
      parent_[cur] = r;
      parity_[cur] = cs;
      cur = next;
      cs = next_s;
    }
    return {r, s};
  }

  // Impose value(a) = rel * value(b).
  void unite(std::size_t a, std::size_t b, int rel) {
    auto [ra, sa] = find(a);
    auto [rb, sb] = find(b);
    if (ra == rb) {
      if (sa != rel * sb) throw ConstraintError("contradictory tie constraints");
      return;
    }
    parent_[ra] = rb;
    parity_[ra] = sa * rel * sb;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> parity_;
};

BasisTag trig_tag(int d, std::initializer_list<int> sines, std::initializer_list<int> cosines) {
  std::vector<int> s(static_cast<std::size_t>(d), 0), c(static_cast<std::size_t>(d), 0);
  for (int i : sines) ++s[static_cast<std::size_t>(i)];
  for (int i : cosines) ++c[static_cast<std::size_t>(i)];
  return BasisTag::trig(std::move(s), std::move(c));
}

int require(const Dictionary& dict, const BasisTag& tag) {
  auto idx = dict.find(tag);
  if (!idx) throw ConstraintError("constraint refers to a basis function missing from the dictionary");
  return *idx;
}

void add_pair(std::vector<TieGroup>& out, std::set<std::pair<int, int>>& seen, int rows, TieMember a, TieMember b) {
  const int pa = a.row + a.col * rows, pb = b.row + b.col * rows;
  if (pa == pb) return;
  if (!seen.insert({std::min(pa, pb), std::max(pa, pb)}).second) return;
  out.push_back({{a, b}});
}

}  // namespace

std::string to_string(Relation r) { return r == Relation::Eq ? "eq" : "le"; }

RowScales pool_tied_scales(const RowScales& scales, const std::vector<TieGroup>& ties) {
  const auto n = static_cast<std::size_t>(scales.scales.size());
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const auto& g : ties) {
    for (const auto& m : g.members) {
      if (m.row < 0 || static_cast<std::size_t>(m.row) >= n) throw ConstraintError("tie row out of range");
      parent[find(static_cast<std::size_t>(m.row))] = find(static_cast<std::size_t>(g.members.front().row));
    }
  }
  std::vector<double> sum(n, 0.0);
  std::vector<int> count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    sum[find(i)] += scales.scales(static_cast<Eigen::Index>(i)) * scales.scales(static_cast<Eigen::Index>(i));
    ++count[find(i)];
  }
  RowScales out{scales.scales};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    out.scales(static_cast<Eigen::Index>(i)) = std::sqrt(sum[r] / count[r]);
  }
  return out;
}

std::vector<LinearConstraint> rescale_constraints(std::vector<LinearConstraint> generals, const RowScales& scales) {
  for (auto& c : generals) {
    if (c.coefficients.rows() != scales.scales.size()) throw ConstraintError("constraint rows do not match scales");
    c.coefficients = scales.scales.cwiseInverse().asDiagonal() * c.coefficients;
  }
  return generals;
}

Polytope::Polytope(double radius, int rows, int cols, const std::vector<TieGroup>& ties,
                   std::vector<LinearConstraint> generals)
    : radius_(radius), rows_(rows), cols_(cols), ties_(ties), generals_(std::move(generals)) {
  if (!(radius >= 0) || !std::isfinite(radius)) throw InputError("polytope: radius must be finite and nonnegative");
  if (rows < 1 || cols < 1) throw InputError("polytope: empty coefficient shape");
  const auto total = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  SignedUnionFind uf(total);
  for (const auto& g : ties_) {
    if (g.members.size() < 2) throw ConstraintError("tie group needs at least two members");
    std::set<int> positions;
    for (const auto& m : g.members) {
      if (m.row < 0 || m.row >= rows || m.col < 0 || m.col >= cols) throw ConstraintError("tie member out of range");
      if (m.sign != 1 && m.sign != -1) throw ConstraintError("tie sign must be +1 or -1");
      if (!positions.insert(m.row + m.col * rows).second) throw ConstraintError("tie group repeats a position");
    }
    const auto& first = g.members.front();
    for (std::size_t k = 1; k < g.members.size(); ++k) {
      const auto& m = g.members[k];
      // sign_m * w_m = sign_first * w_first
      uf.unite(static_cast<std::size_t>(m.row + m.col * rows), static_cast<std::size_t>(first.row + first.col * rows),
               m.sign * first.sign);
    }
  }
  for (const auto& c : generals_) {
    if (c.coefficients.rows() != rows || c.coefficients.cols() != cols) {
      throw ConstraintError("general constraint has the wrong shape");
    }
    if (!c.coefficients.allFinite() || !std::isfinite(c.rhs)) throw ConstraintError("general constraint not finite");
  }

  variable_.assign(total, -1);
  sign_.assign(total, 1);
  std::vector<int> root_variable(total, -1);
  std::vector<int> root_sign(total, 1);
  for (std::size_t p = 0; p < total; ++p) {
    auto [r, s] = uf.find(p);
    if (root_variable[r] < 0) {
      root_variable[r] = static_cast<int>(members_.size());
      root_sign[r] = s;  // first member gets sign +1
      members_.emplace_back();
    }
    const int v = root_variable[r];
    variable_[p] = v;
    sign_[p] = s * root_sign[r];
    members_[static_cast<std::size_t>(v)].push_back(
        {static_cast<int>(p % static_cast<std::size_t>(rows)), static_cast<int>(p / static_cast<std::size_t>(rows)),
         sign_[p]});
  }
  weights_.resize(static_cast<Eigen::Index>(members_.size()));
  for (std::size_t v = 0; v < members_.size(); ++v) weights_(static_cast<Eigen::Index>(v)) = double(members_[v].size());
}

Matrix Polytope::expand(const Vector& z) const {
  if (z.size() != reduced_size()) throw InputError("expand: reduced vector has the wrong length");
  Matrix omega(rows_, cols_);
  for (int c = 0; c < cols_; ++c) {
    for (int r = 0; r < rows_; ++r) omega(r, c) = sign_of(r, c) * z(variable_of(r, c));
  }
  return omega;
}

Vector Polytope::reduce(const Matrix& omega) const {
  Vector z(reduced_size());
  for (int v = 0; v < reduced_size(); ++v) {
    const auto& m = members_[static_cast<std::size_t>(v)].front();
    z(v) = m.sign * omega(m.row, m.col);
  }
  return z;
}

Vector Polytope::reduce_gradient(const Matrix& G) const {
  Vector g = Vector::Zero(reduced_size());
  for (int c = 0; c < cols_; ++c) {
    for (int r = 0; r < rows_; ++r) g(variable_of(r, c)) += sign_of(r, c) * G(r, c);
  }
  return g;
}

Matrix Polytope::reduced_general_rows() const {
  Matrix out(static_cast<Eigen::Index>(generals_.size()), reduced_size());
  for (std::size_t l = 0; l < generals_.size(); ++l) {
    out.row(static_cast<Eigen::Index>(l)) = reduce_gradient(generals_[l].coefficients).transpose();
  }
  return out;
}

Polytope Polytope::with_radius(double radius) const {
  Polytope copy = *this;
  if (!(radius >= 0) || !std::isfinite(radius)) throw InputError("polytope: radius must be finite and nonnegative");
  copy.radius_ = radius;
  return copy;
}

double Polytope::violation(const Matrix& omega) const {
  double worst = std::max(0.0, omega.cwiseAbs().sum() - radius_);
  for (int v = 0; v < reduced_size(); ++v) {
    const auto& ms = members_[static_cast<std::size_t>(v)];
    const double ref = ms.front().sign * omega(ms.front().row, ms.front().col);
    for (const auto& m : ms) worst = std::max(worst, std::abs(m.sign * omega(m.row, m.col) - ref));
  }
  for (const auto& c : generals_) {
    const double lhs = c.coefficients.cwiseProduct(omega).sum();
    const double gap = c.relation == Relation::Eq ? std::abs(lhs - c.rhs) : std::max(0.0, lhs - c.rhs);
    worst = std::max(worst, gap);
  }
  return worst;
}

Polytope build_polytope(double alpha, int rows, int cols, const std::vector<TieGroup>& ties,
                        std::vector<LinearConstraint> generals) {
  return Polytope(alpha, rows, cols, ties, std::move(generals));
}

std::vector<TieGroup> kuramoto_symmetry(const Dictionary& dict, int d) {
  if (dict.dim() != d) throw ConstraintError("kuramoto symmetry: dictionary dimension mismatch");
  const int n = dict.size();
  std::vector<TieGroup> out;
  std::set<std::pair<int, int>> seen;
  auto idx = [&](std::initializer_list<int> s, std::initializer_list<int> c) { return require(dict, trig_tag(d, s, c)); };
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      add_pair(out, seen, n, {idx({i}, {}), j, 1}, {idx({j}, {}), i, 1});
      add_pair(out, seen, n, {idx({}, {i}), i, 1}, {idx({}, {j}), i, 1});
      add_pair(out, seen, n, {idx({}, {i}), j, 1}, {idx({}, {j}), i, 1});
      add_pair(out, seen, n, {idx({i}, {j}), j, 1}, {idx({j}, {i}), i, 1});
      add_pair(out, seen, n, {idx({j}, {i}), j, 1}, {idx({i}, {j}), i, 1});
      add_pair(out, seen, n, {idx({i, j}, {}), j, 1}, {idx({i, j}, {}), i, 1});
      add_pair(out, seen, n, {idx({}, {i, j}), j, 1}, {idx({}, {i, j}), i, 1});
    }
  }
  return out;
}

std::vector<TieGroup> fput_symmetry(const Dictionary& dict, int d) {
  if (dict.dim() != d) throw ConstraintError("fput symmetry: dictionary dimension mismatch");
  if (dict.spec().kind != DictionarySpec::Kind::Monomial || dict.spec().max_degree < 3) {
    throw ConstraintError("fput symmetry needs a monomial dictionary of degree at least 3");
  }
  const int n = dict.size();
  std::vector<TieGroup> out;
  std::set<std::pair<int, int>> seen;
  auto mono = [&](int i, int a, int j, int b) {
    std::vector<int> e(static_cast<std::size_t>(d), 0);
    e[static_cast<std::size_t>(i)] += a;
    e[static_cast<std::size_t>(j)] += b;
    return require(dict, BasisTag::monomial(std::move(e)));
  };
  for (int i = 0; i < d; ++i) {
    for (int j : {i - 1, i + 1}) {
      if (j < 0 || j >= d) continue;
      for (int a = 1; a <= 2; ++a) {
        for (int b = 1; a + b <= 3; ++b) {
          add_pair(out, seen, n, {mono(i, a, j, b), j, 1}, {mono(i, b, j, a), i, 1});
        }
      }
    }
  }
  return out;
}

std::vector<TieGroup> spring_mass_symmetry(const Dictionary& dict) {
  if (dict.dim() != 2) throw ConstraintError("spring-mass symmetry needs a two-dimensional dictionary");
  const int x1 = require(dict, BasisTag::monomial({1, 0}));
  const int x2 = require(dict, BasisTag::monomial({0, 1}));
  return {TieGroup{{{x2, 0, 1}, {x1, 1, 1}}}};
}

std::vector<LinearConstraint> mm_conservation(const Dictionary& dict) {
  if (dict.dim() != 4) throw ConstraintError("Michaelis-Menten conservation needs four species");
  const int n = dict.size();
  std::vector<LinearConstraint> out;
  constexpr int E = 0, S = 1, ES = 2, P = 3;
  for (int r = 0; r < n; ++r) {
    LinearConstraint substrate{Matrix::Zero(n, 4), 0.0, Relation::Eq};
    substrate.coefficients(r, S) = 1;
    substrate.coefficients(r, ES) = 1;
    substrate.coefficients(r, P) = 1;
    out.push_back(std::move(substrate));
  }
  for (int r = 0; r < n; ++r) {
    LinearConstraint enzyme{Matrix::Zero(n, 4), 0.0, Relation::Eq};
    enzyme.coefficients(r, E) = 1;
    enzyme.coefficients(r, ES) = 1;
    out.push_back(std::move(enzyme));
  }
  return out;
}

std::vector<LinearConstraint> conservation_band(const Matrix& psi, const Vector& a, double c, double eps) {
  if (!(eps >= 0)) throw ConstraintError("conservation band: eps must be nonnegative");
  std::vector<LinearConstraint> out;
  for (Eigen::Index i = 0; i < psi.cols(); ++i) {
    Matrix coeff = psi.col(i) * a.transpose();
    out.push_back({coeff, c + eps, Relation::Le});
    out.push_back({-coeff, eps - c, Relation::Le});
  }
  return out;
}

}  // namespace sparsedyn
