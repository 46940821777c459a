#pragma once

#include <Eigen/Dense>

namespace sparsedyn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace sparsedyn
