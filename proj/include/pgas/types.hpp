#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <vector>

namespace pgas {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sorted list of coordinate indices.
using IndexSet = std::vector<std::size_t>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace pgas
