#pragma once

#include <string>
#include <vector>

#include "sparsedyn/dictionary.hpp"
#include "sparsedyn/types.hpp"

namespace sparsedyn {

struct TieMember {
  int row = 0;  // basis index
  int col = 0;  // output (state component) index
  int sign = 1;
};

// Positions constrained to share one value up to sign: sign_a * Omega(a) ==
// sign_b * Omega(b) for all members a, b.
struct TieGroup {
  std::vector<TieMember> members;
};

enum class Relation { Eq, Le };

// trace(coefficients^T Omega) relation rhs.
struct LinearConstraint {
  Matrix coefficients;
  double rhs = 0.0;
  Relation relation = Relation::Eq;
};

enum class LmoStrategy { ClosedForm, LinearProgram };

// Weighted l1 ball in the reduced variables left after merging ties,
// intersected with the general linear constraints.
class Polytope {
 public:
  Polytope(double radius, int rows, int cols, const std::vector<TieGroup>& ties,
           std::vector<LinearConstraint> generals);

  double radius() const { return radius_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int reduced_size() const { return static_cast<int>(weights_.size()); }
  const Vector& weights() const { return weights_; }
  LmoStrategy strategy() const { return generals_.empty() ? LmoStrategy::ClosedForm : LmoStrategy::LinearProgram; }
  const std::vector<TieGroup>& ties() const { return ties_; }
  const std::vector<LinearConstraint>& generals() const { return generals_; }

  // Reduced variable of each position (column-major, row + col * rows) and
  // the sign relating them: Omega(pos) = sign * z(variable).
  int variable_of(int row, int col) const { return variable_[static_cast<std::size_t>(row + col * rows_)]; }
  int sign_of(int row, int col) const { return sign_[static_cast<std::size_t>(row + col * rows_)]; }
  const std::vector<TieMember>& members(int variable) const { return members_[static_cast<std::size_t>(variable)]; }

  Matrix expand(const Vector& z) const;
  // Value of each reduced variable read from its first member.
  Vector reduce(const Matrix& omega) const;
  // <G, expand(z)> = <reduce_gradient(G), z>.
  Vector reduce_gradient(const Matrix& G) const;
  // Rows of general constraints in reduced variables.
  Matrix reduced_general_rows() const;

  Polytope with_radius(double radius) const;

  // Largest violation of the ball, ties and general constraints.
  double violation(const Matrix& omega) const;

 private:
  double radius_;
  int rows_, cols_;
  std::vector<TieGroup> ties_;
  std::vector<LinearConstraint> generals_;
  std::vector<int> variable_;
  std::vector<int> sign_;
  std::vector<std::vector<TieMember>> members_;
  Vector weights_;
};

Polytope build_polytope(double alpha, int rows, int cols, const std::vector<TieGroup>& ties,
                        std::vector<LinearConstraint> generals = {});

// The seven coupling symmetries of the forced Kuramoto model over the
// pairwise trigonometric dictionary.
std::vector<TieGroup> kuramoto_symmetry(const Dictionary& dict, int d);

// xi_j(x_i^a x_j^b) = xi_i(x_i^b x_j^a) for neighbours j = i +- 1, a, b >= 1,
// a + b <= 3.
std::vector<TieGroup> fput_symmetry(const Dictionary& dict, int d);

// xi_1(x_2) = xi_2(x_1) for two coupled masses.
std::vector<TieGroup> spring_mass_symmetry(const Dictionary& dict);

// Per feature row: xi_S + xi_ES + xi_P = 0 and xi_E + xi_ES = 0, species in
// the order (E, S, ES, P).
std::vector<LinearConstraint> mm_conservation(const Dictionary& dict);

// |sum_j a_j xi_j^T psi(y_i) - c| <= eps at every sample: two Le rows per
// column of psi (n x m).
std::vector<LinearConstraint> conservation_band(const Matrix& psi, const Vector& a, double c, double eps);

// Ties hold between normalized coefficients only when the tied rows share a
// scale. Rows connected by a tie get the root mean square of their scales.
RowScales pool_tied_scales(const RowScales& scales, const std::vector<TieGroup>& ties);
// Constraints written on raw coefficients, rewritten for coefficients fitted
// on rows divided by `scales`.
std::vector<LinearConstraint> rescale_constraints(std::vector<LinearConstraint> generals, const RowScales& scales);

std::string to_string(Relation r);

}  // namespace sparsedyn
