#include "sparsedyn/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include "sparsedyn/errors.hpp"
#include "sparsedyn/lp.hpp"

namespace sparsedyn {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Entry {
  int row;
  int col;
  double value;
};

std::vector<Entry> nonzeros(const Matrix& M) {
  std::vector<Entry> out;
  for (Eigen::Index c = 0; c < M.cols(); ++c) {
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
      if (M(r, c) != 0.0) out.push_back({static_cast<int>(r), static_cast<int>(c), M(r, c)});
    }
  }
  return out;
}

bool same_vertex(const std::vector<Entry>& a, const std::vector<Entry>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].row != b[k].row || a[k].col != b[k].col) return false;
    if (std::abs(a[k].value - b[k].value) > 1e-12 * std::max(1.0, std::abs(a[k].value))) return false;
  }
  return true;
}

// Vertices of the current convex combination with the quadratic-form caches
// Q_ij = <V_i, G V_j> and c_i = <V_i, A B^T>.
class ActiveSet {
 public:
  explicit ActiveSet(const RegressionProblem& p) : p_(p) {}

  std::size_t size() const { return atoms_.size(); }
  const Matrix& Q() const { return Q_; }
  const Vector& c() const { return c_; }
  Vector& weights() { return lambda_; }
  const Vector& weights() const { return lambda_; }

  std::size_t count_vertices() const {
    return static_cast<std::size_t>(std::count_if(atoms_.begin(), atoms_.end(), [](const Atom& a) { return !a.start; }));
  }

  // Index of the vertex, appended with weight 0 when new.
  std::size_t add(const Matrix& vertex, bool start = false) {
    std::vector<Entry> e = nonzeros(vertex);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (same_vertex(atoms_[i].entries, e)) return i;
    }
    const auto k = static_cast<Eigen::Index>(atoms_.size());
    Matrix Qn(k + 1, k + 1);
    Qn.topLeftCorner(k, k) = Q_;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double q = inner(e, atoms_[static_cast<std::size_t>(j)].entries);
      Qn(k, j) = q;
      Qn(j, k) = q;
    }
    Qn(k, k) = inner(e, e);
    Q_ = std::move(Qn);
    c_.conservativeResize(k + 1);
    double ci = 0.0;
    for (const auto& en : e) ci += en.value * p_.cross()(en.row, en.col);
    c_(k) = ci;
    lambda_.conservativeResize(k + 1);
    lambda_(k) = 0.0;
    atoms_.push_back({std::move(e), start});
    return static_cast<std::size_t>(k);
  }

  void purge() {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < lambda_.size(); ++i) {
      if (lambda_(i) > 0.0) keep.push_back(i);
    }
    if (keep.size() == atoms_.size()) return;
    const auto k = static_cast<Eigen::Index>(keep.size());
    Matrix Qn(k, k);
    Vector cn(k), ln(k);
    std::vector<Atom> an;
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) Qn(a, b) = Q_(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
      cn(a) = c_(keep[static_cast<std::size_t>(a)]);
      ln(a) = lambda_(keep[static_cast<std::size_t>(a)]);
      an.push_back(std::move(atoms_[static_cast<std::size_t>(keep[static_cast<std::size_t>(a)])]));
    }
    Q_ = std::move(Qn);
    c_ = std::move(cn);
    lambda_ = ln / ln.sum();
    atoms_ = std::move(an);
  }

  Matrix iterate() const {
    Matrix omega = Matrix::Zero(p_.features(), p_.outputs());
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const double w = lambda_(static_cast<Eigen::Index>(i));
      if (w == 0.0) continue;
      for (const auto& e : atoms_[i].entries) omega(e.row, e.col) += w * e.value;
    }
    return omega;
  }

 private:
  struct Atom {
    std::vector<Entry> entries;
    bool start;
  };

  double inner(const std::vector<Entry>& a, const std::vector<Entry>& b) const {
    double s = 0.0;
    for (const auto& ea : a) {
      for (const auto& eb : b) {
        if (ea.col == eb.col) s += ea.value * eb.value * p_.gram()(ea.row, eb.row);
      }
    }
    return s;
  }

  const RegressionProblem& p_;
  std::vector<Atom> atoms_;
  Matrix Q_;
  Vector c_;
  Vector lambda_;
};

double power_iteration(const Matrix& Q, int iterations = 20, double rtol = 1e-6) {
  if (Q.rows() == 0) return 0.0;
  Vector v = Vector::Ones(Q.rows()) / std::sqrt(double(Q.rows()));
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = Q * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / norm;
    if (it > 0 && std::abs(next - estimate) <= rtol * std::abs(next)) return std::max(next, (Q * v).dot(v));
    estimate = next;
  }
  return std::max(estimate, (Q * v).dot(v));
}

struct Evaluation {
  Matrix grad;
  double objective;
};

Evaluation evaluate(const RegressionProblem& p, const Matrix& omega) {
  Matrix Go = p.gram() * omega;
  Evaluation ev;
  ev.objective = p.target_norm_sq() + omega.cwiseProduct(Go - 2 * p.cross()).sum();
  ev.grad = 2 * (Go - p.cross());
  if (!std::isfinite(ev.objective)) throw SolverError("non-finite objective");
  return ev;
}

void check_start(const Polytope& polytope, const RegressionProblem& p, const Matrix& omega) {
  if (omega.rows() != p.features() || omega.cols() != p.outputs()) throw InputError("solver: start point shape mismatch");
  if (polytope.rows() != p.features() || polytope.cols() != p.outputs()) {
    throw InputError("solver: polytope shape does not match the problem");
  }
  if (polytope.violation(omega) > 1e-9) throw InputError("solver: start point is not feasible");
}

double simplex_gap(const Vector& grad, const Vector& x) { return grad.dot(x) - grad.minCoeff(); }

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

LmoResult lmo_closed_form(const Matrix& G, const Polytope& polytope) {
  if (polytope.strategy() != LmoStrategy::ClosedForm) {
    throw InputError("closed-form LMO cannot honor general constraints");
  }
  const Vector g = polytope.reduce_gradient(G);
  LmoResult out;
  Vector z = Vector::Zero(g.size());
  Eigen::Index best = -1;
  double best_score = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double score = std::abs(g(j)) / polytope.weights()(j);
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  if (best < 0) {
    out.zero_gradient = true;
  } else {
    z(best) = (g(best) > 0 ? -1.0 : 1.0) * polytope.radius() / polytope.weights()(best);
  }
  out.vertex = polytope.expand(z);
  return out;
}

LmoResult lmo_lp(const Matrix& G, const Polytope& polytope) {
  const Vector g = polytope.reduce_gradient(G);
  const Eigen::Index r = g.size();
  const Matrix rows = polytope.reduced_general_rows();
  const auto& generals = polytope.generals();
  Eigen::Index n_eq = 0;
  for (const auto& c : generals) n_eq += c.relation == Relation::Eq ? 1 : 0;
  const Eigen::Index n_le = static_cast<Eigen::Index>(generals.size()) - n_eq;

  LinearProgram lp;
  lp.cost.resize(2 * r);
  lp.cost << g, -g;
  lp.eq_matrix.resize(n_eq, 2 * r);
  lp.eq_rhs.resize(n_eq);
  lp.le_matrix.resize(n_le + 1, 2 * r);
  lp.le_rhs.resize(n_le + 1);
  lp.le_matrix.row(0) << polytope.weights().transpose(), polytope.weights().transpose();
  lp.le_rhs(0) = polytope.radius();
  Eigen::Index ie = 0, il = 1;
  for (std::size_t l = 0; l < generals.size(); ++l) {
    const auto row = rows.row(static_cast<Eigen::Index>(l));
    if (generals[l].relation == Relation::Eq) {
      lp.eq_matrix.row(ie) << row, -row;
      lp.eq_rhs(ie++) = generals[l].rhs;
    } else {
      lp.le_matrix.row(il) << row, -row;
      lp.le_rhs(il++) = generals[l].rhs;
    }
  }
  LpSolution sol = solve_lp(lp);
  const Vector z = sol.x.head(r) - sol.x.tail(r);
  LmoResult out;
  out.zero_gradient = g.isZero(0.0);
  out.vertex = polytope.expand(z);
  return out;
}

LmoResult lmo(const Matrix& G, const Polytope& polytope) {
  return polytope.strategy() == LmoStrategy::ClosedForm ? lmo_closed_form(G, polytope) : lmo_lp(G, polytope);
}

Vector project_simplex(const Vector& v) {
  if (v.size() == 0) throw InputError("project_simplex: empty vector");
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0) theta = t;
  }
  Vector x = (v.array() - theta).max(0.0).matrix();
  return x;
}

SimplexResult apgd_simplex(const Matrix& Q, const Vector& c, const Vector& lambda0, double gap_target,
                           std::size_t max_iterations) {
  const Eigen::Index k = c.size();
  if (k == 0 || Q.rows() != k || Q.cols() != k || lambda0.size() != k) throw InputError("apgd_simplex: size mismatch");
  SimplexResult res;
  if (k == 1) {
    res.weights = Vector::Ones(1);
    res.reached = true;
    return res;
  }
  auto h = [&](const Vector& x) { return x.dot(Q * x) - 2 * c.dot(x); };
  auto grad = [&](const Vector& x) -> Vector { return 2 * (Q * x - c); };

  const double lmax = power_iteration(Q);
  double L = 2 * lmax;
  const double floor = 1e-14 * (Q.diagonal().cwiseAbs().maxCoeff() + c.cwiseAbs().maxCoeff()) + 1e-300;
  L = std::max(L, floor);
  // Power iteration on the shifted matrix overestimates the smallest curvature, so use a dense solve.
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(Q, Eigen::EigenvaluesOnly);
  const double mu = std::max(0.0, 2 * eig.eigenvalues()(0));
  const bool strongly_convex = mu > 1e-8 * L;

  Vector x = project_simplex(lambda0);
  Vector y = x;
  double hx = h(x);
  double t = 1.0;
  bool restarted = true;
  for (std::size_t it = 0;; ++it) {
    const Vector gx = grad(x);
    res.gap = simplex_gap(gx, x);
    res.iterations = it;
    if (res.gap <= gap_target) {
      res.reached = true;
      break;
    }
    if (it >= max_iterations) break;
    const Vector z = project_simplex(y - grad(y) / L);
    const double hz = h(z);
    if (hz > hx) {
      if (restarted) {
        if (hz - hx > 1e-13 * std::max(1.0, std::abs(hx))) {
          L *= 2;
          continue;
        }
      } else {
        y = x;
        t = 1.0;
        restarted = true;
        continue;
      }
    }
    const Vector x_old = x;
    x = z;
    hx = hz;
    double beta;
    if (strongly_convex) {
      const double q = std::sqrt(mu / L);
      beta = (1 - q) / (1 + q);
    } else {
      const double t_next = 0.5 * (1 + std::sqrt(1 + 4 * t * t));
      beta = (t - 1) / t_next;
      t = t_next;
    }
    y = x + beta * (x - x_old);
    restarted = false;
  }
  res.weights = x;
  return res;
}

SimplexResult apgd_simplex_ls(const Matrix& Lambda, const Vector& b, const Vector& lambda0, double gap_target,
                              std::size_t max_iterations) {
  if (Lambda.rows() != b.size()) throw InputError("apgd_simplex: size mismatch");
  return apgd_simplex(Lambda.transpose() * Lambda, Lambda.transpose() * b, lambda0, gap_target, max_iterations);
}

double frank_wolfe_gap(const RegressionProblem& p, const Polytope& polytope, const Matrix& omega) {
  const Matrix g = gradient(p, omega);
  const Matrix v = lmo(g, polytope).vertex;
  return (omega - v).cwiseProduct(g).sum();
}

SolveReport cg_solve(const RegressionProblem& p, const Polytope& polytope, const Matrix& omega1,
                     const SolverOptions& options) {
  check_start(polytope, p, omega1);
  const auto start = Clock::now();
  SolveReport rep;
  rep.solver = "cg";
  rep.hyperparameter = polytope.radius();
  Matrix omega = omega1;
  std::vector<std::vector<Entry>> atoms{nonzeros(omega1)};
  std::vector<double> weights{1.0};
  for (std::size_t k = 1;; ++k) {
    const Evaluation ev = evaluate(p, omega);
    const Matrix V = lmo(ev.grad, polytope).vertex;
    const double gap = (omega - V).cwiseProduct(ev.grad).sum();
    const auto used = static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0; }));
    rep.trace.push_back({ev.objective, gap, used, elapsed(start)});
    rep.fw_gap = gap;
    rep.vertex_count = used;
    if (gap <= options.gap_tolerance) {
      rep.converged = true;
      break;
    }
    if (k > options.max_iterations) break;
    const Matrix D = V - omega;
    const LineSearch ls = exact_linesearch(p, omega, D, ev.grad);
    if (ls.clipped) {
      ++rep.clipped_steps;
      rep.clipped_iterations.push_back(k);
    }
    rep.iterations = k;
    if (ls.step == 0.0) {
      rep.warnings.push_back(ls.null_direction ? "null search direction" : "zero step length");
      break;
    }
    omega += ls.step * D;
    for (double& w : weights) w *= (1 - ls.step);
    std::vector<Entry> e = nonzeros(V);
    bool found = false;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (same_vertex(atoms[i], e)) {
        weights[i] += ls.step;
        found = true;
        break;
      }
    }
    if (!found) {
      atoms.push_back(std::move(e));
      weights.push_back(ls.step);
    }
    if (options.on_iterate) options.on_iterate(k, omega);
  }
  rep.omega = omega;
  rep.seconds = elapsed(start);
  return rep;
}

SolveReport fccg_solve(const RegressionProblem& p, const Polytope& polytope, const Matrix& omega1,
                       const SolverOptions& options) {
  check_start(polytope, p, omega1);
  const auto start = Clock::now();
  SolveReport rep;
  rep.solver = "fccg";
  rep.hyperparameter = polytope.radius();
  ActiveSet S(p);
  S.add(omega1, true);
  S.weights()(0) = 1.0;
  Matrix omega = omega1;
  for (std::size_t k = 1;; ++k) {
    const Evaluation ev = evaluate(p, omega);
    const Matrix V = lmo(ev.grad, polytope).vertex;
    const double gap = (omega - V).cwiseProduct(ev.grad).sum();
    rep.trace.push_back({ev.objective, gap, S.count_vertices(), elapsed(start)});
    rep.fw_gap = gap;
    rep.vertex_count = S.count_vertices();
    if (gap <= options.gap_tolerance) {
      rep.converged = true;
      break;
    }
    if (k > options.max_iterations) break;
    S.add(V);
    SimplexResult sub =
        apgd_simplex(S.Q(), S.c(), S.weights(), options.subproblem_tolerance, options.subproblem_max_iterations);
    if (!sub.reached) rep.warnings.push_back("correction stopped at gap " + std::to_string(sub.gap));
    S.weights() = sub.weights;
    S.purge();
    omega = S.iterate();
    rep.iterations = k;
    if (options.on_iterate) options.on_iterate(k, omega);
  }
  rep.omega = omega;
  rep.seconds = elapsed(start);
  return rep;
}

SolveReport bcg_solve(const RegressionProblem& p, const Polytope& polytope, const SolverOptions& options) {
  return bcg_solve(p, polytope, Matrix::Zero(p.features(), p.outputs()), options);
}

SolveReport bcg_solve(const RegressionProblem& p, const Polytope& polytope, const Matrix& omega0,
                      const SolverOptions& options) {
  check_start(polytope, p, omega0);
  const auto start = Clock::now();
  SolveReport rep;
  rep.solver = "bcg";
  rep.hyperparameter = polytope.radius();

  const Evaluation ev0 = evaluate(p, omega0);
  const Matrix V1 = lmo(ev0.grad, polytope).vertex;
  const double gap0 = (omega0 - V1).cwiseProduct(ev0.grad).sum();
  if (gap0 <= options.gap_tolerance) {
    rep.omega = omega0;
    rep.fw_gap = gap0;
    rep.converged = true;
    rep.trace.push_back({ev0.objective, gap0, 0, elapsed(start)});
    rep.seconds = elapsed(start);
    return rep;
  }
  double phi = gap0 / 2;
  ActiveSet S(p);
  S.add(V1);
  S.weights()(0) = 1.0;

  for (std::size_t k = 1;; ++k) {
    SimplexResult sub = apgd_simplex(S.Q(), S.c(), S.weights(), phi, options.subproblem_max_iterations);
    if (!sub.reached) rep.warnings.push_back("descent stopped at gap " + std::to_string(sub.gap));
    S.weights() = sub.weights;
    S.purge();
    Matrix omega = S.iterate();
    const Evaluation ev = evaluate(p, omega);
    const Matrix V = lmo(ev.grad, polytope).vertex;
    const double gap = (omega - V).cwiseProduct(ev.grad).sum();
    rep.trace.push_back({ev.objective, gap, S.size(), elapsed(start)});
    rep.fw_gap = gap;
    rep.vertex_count = S.size();
    rep.iterations = k;
    rep.omega = omega;
    if (gap <= options.gap_tolerance) {
      rep.converged = true;
      if (options.on_iterate) options.on_iterate(k, omega);
      break;
    }
    if (k >= options.max_iterations) {
      if (options.on_iterate) options.on_iterate(k, omega);
      break;
    }
    if (gap <= phi) {
      phi = gap / 2;
    } else {
      const std::size_t idx = S.add(V);
      const Matrix D = V - omega;
      const LineSearch ls = exact_linesearch(p, omega, D, ev.grad);
      if (ls.clipped) {
        ++rep.clipped_steps;
        rep.clipped_iterations.push_back(k);
      }
      Vector& w = S.weights();
      w *= (1 - ls.step);
      w(static_cast<Eigen::Index>(idx)) += ls.step;
      w /= w.sum();
      S.purge();
      omega = S.iterate();
      rep.omega = omega;
    }
    if (options.on_iterate) options.on_iterate(k, omega);
  }
  rep.seconds = elapsed(start);
  return rep;
}

SolveReport stlsq_solve(const RegressionProblem& p, double threshold, const StlsqOptions& options) {
  if (!(threshold >= 0)) throw InputError("stlsq: threshold must be nonnegative");
  const auto start = Clock::now();
  const Eigen::Index n = p.features(), d = p.outputs();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> active =
      options.support ? *options.support : Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, d, true);
  if (active.rows() != n || active.cols() != d) throw InputError("stlsq: support shape mismatch");
  SolveReport rep;
  rep.solver = "stlsq";
  rep.hyperparameter = threshold;
  Matrix omega = Matrix::Zero(n, d);
  for (std::size_t round = 1; round <= options.max_rounds; ++round) {
    rep.iterations = round;
    // Columns sharing an active set share one factorization.
    std::map<std::vector<bool>, std::vector<Eigen::Index>> groups;
    for (Eigen::Index j = 0; j < d; ++j) {
      std::vector<bool> key(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) key[static_cast<std::size_t>(i)] = active(i, j);
      groups[key].push_back(j);
    }
    omega.setZero();
    for (const auto& [key, cols] : groups) {
      std::vector<Eigen::Index> rows;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (key[static_cast<std::size_t>(i)]) rows.push_back(i);
      }
      if (rows.empty()) continue;
      Matrix As(static_cast<Eigen::Index>(rows.size()), p.samples());
      for (std::size_t r = 0; r < rows.size(); ++r) As.row(static_cast<Eigen::Index>(r)) = p.A().row(rows[r]);
      Matrix Bs(static_cast<Eigen::Index>(cols.size()), p.samples());
      for (std::size_t c = 0; c < cols.size(); ++c) Bs.row(static_cast<Eigen::Index>(c)) = p.B().row(cols[c]);
      const Matrix coef = least_squares(As, Bs);
      for (std::size_t c = 0; c < cols.size(); ++c) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
          omega(rows[r], cols[c]) = coef(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
      }
    }
    bool removed = false;
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (active(i, j) && std::abs(omega(i, j)) < threshold) {
          active(i, j) = false;
          omega(i, j) = 0.0;
          removed = true;
        }
      }
    }
    rep.trace.push_back({objective_gram(p, omega), 0.0, static_cast<std::size_t>(active.count()), elapsed(start)});
    if (!removed) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged) rep.warnings.push_back("thresholding round limit reached");
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!active.col(j).any()) rep.warnings.push_back("all features thresholded in column " + std::to_string(j));
  }
  rep.omega = omega;
  rep.vertex_count = static_cast<std::size_t>(active.count());
  rep.fw_gap = std::numeric_limits<double>::quiet_NaN();
  rep.seconds = elapsed(start);
  return rep;
}

double lasso_kkt_residual(const RegressionProblem& p, const Matrix& omega, double lambda) {
  const Matrix g = gradient(p, omega);
  double worst = 0.0;
  for (Eigen::Index c = 0; c < omega.cols(); ++c) {
    for (Eigen::Index r = 0; r < omega.rows(); ++r) {
      const double w = omega(r, c);
      const double res = w != 0.0 ? std::abs(g(r, c) + lambda * (w > 0 ? 1.0 : -1.0))
                                  : std::max(0.0, std::abs(g(r, c)) - lambda);
      worst = std::max(worst, res);
    }
  }
  return worst;
}

SolveReport fista_solve(const RegressionProblem& p, double lambda, const FistaOptions& options) {
  if (!(lambda >= 0)) throw InputError("fista: regularization must be nonnegative");
  const auto start = Clock::now();
  SolveReport rep;
  rep.solver = "fista";
  rep.hyperparameter = lambda;
  const Eigen::Index n = p.features(), d = p.outputs();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(p.gram(), Eigen::EigenvaluesOnly);
  const double L = 2 * eig.eigenvalues().maxCoeff();
  Matrix x = Matrix::Zero(n, d);
  auto penalized = [&](const Matrix& w) { return objective_gram(p, w) + lambda * w.cwiseAbs().sum(); };
  if (!(L > 0)) {
    rep.omega = x;
    rep.converged = true;
    return rep;
  }
  Matrix y = x;
  double F = penalized(x);
  double t = 1.0;
  bool restarted = true;
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    rep.iterations = it;
    const Matrix step = y - 2 * (p.gram() * y - p.cross()) / L;
    Matrix z = step.unaryExpr([&](double v) { return soft_threshold(v, lambda / L); });
    const double Fz = penalized(z);
    if (!std::isfinite(Fz)) throw SolverError("fista: non-finite objective");
    if (Fz > F && !restarted) {
      y = x;
      t = 1.0;
      restarted = true;
      continue;
    }
    const double decrease = F - Fz;
    const Matrix x_old = x;
    x = std::move(z);
    F = Fz;
    const double t_next = 0.5 * (1 + std::sqrt(1 + 4 * t * t));
    y = x + ((t - 1) / t_next) * (x - x_old);
    t = t_next;
    restarted = false;
    rep.trace.push_back({F, 0.0, static_cast<std::size_t>((x.array() != 0.0).count()), elapsed(start)});
    if (decrease < options.tolerance && lasso_kkt_residual(p, x, lambda) <= options.kkt_tolerance) {
      rep.converged = true;
      break;
    }
  }
  rep.omega = x;
  rep.fw_gap = std::numeric_limits<double>::quiet_NaN();
  rep.vertex_count = static_cast<std::size_t>((x.array() != 0.0).count());
  rep.seconds = elapsed(start);
  return rep;
}

}  // namespace sparsedyn
