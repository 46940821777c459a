#include "sparsedyn/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "sparsedyn/errors.hpp"

namespace sparsedyn {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr std::size_t kMaxPivots = 200000;

class Tableau {
 public:
  // rows x (cols + 1); the last column holds the right-hand side. The
  // objective row is kept separately.
  Tableau(Matrix body, std::vector<int> basis) : T_(std::move(body)), basis_(std::move(basis)) {}

  Eigen::Index rows() const { return T_.rows(); }
  Eigen::Index cols() const { return T_.cols() - 1; }
  const Matrix& body() const { return T_; }
  const std::vector<int>& basis() const { return basis_; }

  void pivot(Eigen::Index r, Eigen::Index c, Vector& reduced) {
    T_.row(r) /= T_(r, c);
    for (Eigen::Index i = 0; i < T_.rows(); ++i) {
      if (i != r && T_(i, c) != 0.0) T_.row(i) -= T_(i, c) * T_.row(r);
    }
    if (reduced(c) != 0.0) reduced -= reduced(c) * T_.row(r).transpose();
    basis_[static_cast<std::size_t>(r)] = static_cast<int>(c);
    ++pivots_;
    if (pivots_ > kMaxPivots) throw SolverError("linear program: pivot limit reached");
  }

  // reduced = cost - cost_B^T T, with the last entry holding -objective.
  Vector reduced_costs(const Vector& cost) const {
    Vector r = Vector::Zero(T_.cols());
    r.head(cols()) = cost;
    for (Eigen::Index i = 0; i < rows(); ++i) {
      const double cb = cost(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) r -= cb * T_.row(i).transpose();
    }
    return r;
  }

  // Bland's rule over columns [0, allowed). Returns false when unbounded.
  bool optimize(Vector& reduced, Eigen::Index allowed, double cost_tol) {
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (reduced(j) < -cost_tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows(); ++i) {
        const double a = T_(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = T_(i, cols()) / a;
        const double tie = 1e-12 * std::max(1.0, std::abs(best));
        if (leave < 0 || ratio < best - tie ||
            (ratio <= best + tie && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter, reduced);
    }
  }

  std::size_t pivots() const { return pivots_; }

 private:
  Matrix T_;
  std::vector<int> basis_;
  std::size_t pivots_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const Eigen::Index nx = lp.cost.size();
  const Eigen::Index n_eq = lp.eq_matrix.rows();
  const Eigen::Index n_le = lp.le_matrix.rows();
  if ((n_eq > 0 && lp.eq_matrix.cols() != nx) || (n_le > 0 && lp.le_matrix.cols() != nx) ||
      lp.eq_rhs.size() != n_eq || lp.le_rhs.size() != n_le) {
    throw InputError("linear program: inconsistent dimensions");
  }
  const Eigen::Index m = n_eq + n_le;

  // Rows needing an artificial: every equality and every <= row with a
  // negative right-hand side.
  std::vector<bool> needs_art(static_cast<std::size_t>(m), false);
  Eigen::Index n_art = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const bool eq = i < n_eq;
    const double b = eq ? lp.eq_rhs(i) : lp.le_rhs(i - n_eq);
    if (eq || b < 0) {
      needs_art[static_cast<std::size_t>(i)] = true;
      ++n_art;
    }
  }
  const Eigen::Index n_cols = nx + n_le + n_art;
  Matrix body = Matrix::Zero(m, n_cols + 1);
  std::vector<int> basis(static_cast<std::size_t>(m));
  Eigen::Index art = nx + n_le;
  for (Eigen::Index i = 0; i < m; ++i) {
    const bool eq = i < n_eq;
    double b = eq ? lp.eq_rhs(i) : lp.le_rhs(i - n_eq);
    double flip = b < 0 ? -1.0 : 1.0;
    body.row(i).head(nx) = flip * (eq ? lp.eq_matrix.row(i) : lp.le_matrix.row(i - n_eq));
    if (!eq) body(i, nx + (i - n_eq)) = flip;
    body(i, n_cols) = flip * b;
    if (needs_art[static_cast<std::size_t>(i)]) {
      body(i, art) = 1.0;
      basis[static_cast<std::size_t>(i)] = static_cast<int>(art);
      ++art;
    } else {
      basis[static_cast<std::size_t>(i)] = static_cast<int>(nx + (i - n_eq));
    }
  }
  Tableau tab(std::move(body), std::move(basis));

  const double scale = std::max(1.0, lp.cost.cwiseAbs().maxCoeff());
  if (n_art > 0) {
    Vector phase1 = Vector::Zero(n_cols);
    phase1.tail(n_art).setOnes();
    Vector reduced = tab.reduced_costs(phase1);
    tab.optimize(reduced, n_cols, 1e-12);
    const double infeas = -reduced(n_cols);
    const double rhs_scale = std::max(1.0, tab.body().col(n_cols).cwiseAbs().maxCoeff());
    if (infeas > 1e-9 * rhs_scale) throw InfeasibleError("linear program: constraints are infeasible");
    // Drive remaining artificials out of the basis where possible.
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
      if (tab.basis()[static_cast<std::size_t>(i)] < nx + n_le) continue;
      for (Eigen::Index j = 0; j < nx + n_le; ++j) {
        if (std::abs(tab.body()(i, j)) > kPivotTol) {
          tab.pivot(i, j, reduced);
          break;
        }
      }
    }
  }
  Vector cost = Vector::Zero(n_cols);
  cost.head(nx) = lp.cost;
  Vector reduced = tab.reduced_costs(cost);
  if (!tab.optimize(reduced, nx + n_le, 1e-12 * scale)) throw SolverError("linear program: unbounded");

  LpSolution sol;
  sol.x = Vector::Zero(nx);
  for (Eigen::Index i = 0; i < tab.rows(); ++i) {
    const int b = tab.basis()[static_cast<std::size_t>(i)];
    if (b < nx) sol.x(b) = std::max(0.0, tab.body()(i, n_cols));
  }
  sol.objective = lp.cost.dot(sol.x);
  sol.pivots = tab.pivots();
  return sol;
}

}  // namespace sparsedyn
