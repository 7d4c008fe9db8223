#pragma once

#include <Eigen/Dense>

#include <vector>

namespace marcsinh {

// Rows are samples, columns are features.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Class indices 0..k-1.
using Labels = std::vector<int>;

}  // namespace marcsinh
