#pragma once

#include <random>

#include "sparsedyn/problem.hpp"
#include "sparsedyn/types.hpp"

namespace testing {

inline sparsedyn::Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  sparsedyn::Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

// Random regression with a sparse planted solution.
inline sparsedyn::RegressionProblem random_problem(std::mt19937_64& rng, int n, int d, int m, double noise = 0.1) {
  sparsedyn::Matrix A = random_matrix(rng, n, m);
  sparsedyn::Matrix xi = sparsedyn::Matrix::Zero(n, d);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int j = 0; j < d; ++j) xi(pick(rng), j) = 1.0 + 0.5 * j;
  sparsedyn::Matrix B = xi.transpose() * A + noise * random_matrix(rng, d, m);
  sparsedyn::RegressionProblem p(A, B);
  return p.with_radius(sparsedyn::default_radius(p));
}

}  // namespace testing
