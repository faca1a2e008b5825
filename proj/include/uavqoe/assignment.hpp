#pragma once

#include <Eigen/Core>

#include <vector>

namespace uavqoe
{

/// Minimum-cost assignment of every row to a distinct column (rows <= cols), Hungarian method.
/// Returns the column chosen for each row. Throws std::invalid_argument if rows > cols.
std::vector<int> hungarian_min_cost(const Eigen::MatrixXd &cost);

} // namespace uavqoe
