#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sparsedyn/types.hpp"

namespace sparsedyn {

// Structured description of a basis function. Monomials use `powers` only;
// trigonometric products use `powers` for sine and `cos_powers` for cosine.
struct BasisTag {
  enum class Family { Monomial, Trig };
  Family family = Family::Monomial;
  std::vector<int> powers;
  std::vector<int> cos_powers;

  bool is_constant() const;
  int degree() const;
  // Constants compare equal across families.
  bool matches(const BasisTag& other) const;
  double evaluate(const double* x) const;

  static BasisTag monomial(std::vector<int> powers);
  static BasisTag trig(std::vector<int> sin_powers, std::vector<int> cos_powers);
};

struct BasisFunction {
  int id = 0;
  std::string label;
  BasisTag tag;

  double operator()(const Vector& x) const { return tag.evaluate(x.data()); }
};

struct DictionarySpec {
  enum class Kind { Monomial, TrigPairwise, TrigWithSquares };
  Kind kind = Kind::Monomial;
  int dim = 1;
  int max_degree = 3;  // monomial only
};

class Dictionary {
 public:
  Dictionary(DictionarySpec spec, std::vector<BasisFunction> functions);

  const DictionarySpec& spec() const { return spec_; }
  int size() const { return static_cast<int>(functions_.size()); }
  int dim() const { return spec_.dim; }
  const BasisFunction& operator[](int i) const { return functions_[static_cast<std::size_t>(i)]; }
  const std::vector<BasisFunction>& functions() const { return functions_; }

  std::optional<int> find(const BasisTag& tag) const;
  std::optional<int> find(const std::string& label) const;

  // Columns of X are states; returns n x m feature matrix. When non_finite is
  // given it is set to whether any output entry is NaN or infinite.
  Matrix evaluate(const Matrix& X, bool* non_finite = nullptr) const;
  Vector evaluate_point(const Vector& x) const;

 private:
  DictionarySpec spec_;
  std::vector<BasisFunction> functions_;
};

// Monomials of total degree <= max_degree in graded order, constant first;
// within a degree, exponent vectors in descending lexicographic order
// (x_1^2, x_1*x_2, x_2^2).
Dictionary monomial_dictionary(int d, int max_degree);

// {1} u {sin x_i} u {cos x_i} u {f*g : f, g distinct members of
// [sin x_1..sin x_d, cos x_1..cos x_d]}; cardinality 1 + d + 2d^2.
Dictionary trig_pairwise_dictionary(int d);

// The pairwise set plus sin^2 and cos^2 terms. Rank deficient on any data
// (sin^2 + cos^2 = 1); kept as a test fixture.
Dictionary trig_dictionary_with_squares(int d);

Dictionary make_dictionary(const DictionarySpec& spec);

struct RowScales {
  Vector scales;
};

struct NormalizedFeatures {
  Matrix values;
  RowScales scales;
};

// Divides each row by its population standard deviation (divisor m). Rows
// with zero variance keep scale 1. No centering.
NormalizedFeatures row_normalize(const Matrix& features);
RowScales compute_row_scales(const Matrix& features);
Matrix apply_row_scales(const Matrix& features, const RowScales& scales);

// Coefficients fitted on normalized rows mapped back to raw feature units.
Matrix unscale_coefficients(const Matrix& omega_scaled, const RowScales& scales);

}  // namespace sparsedyn
