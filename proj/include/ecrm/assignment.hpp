#pragma once

#include <vector>

#include "ecrm/common.hpp"

namespace ecrm {

/// Minimum-cost perfect matching of rows to columns of a square cost matrix
/// (negative entries allowed), by the O(d^3) shortest augmenting path method
/// with potentials. Returns the column assigned to each row. Among optimal
/// matchings the lexicographically smallest column vector is returned.
std::vector<int> solve_assignment(const Matrix& cost);

/// Total cost of an assignment.
double assignment_cost(const Matrix& cost, const std::vector<int>& cols);

/// Rank vector (1-based) for a row -> column assignment.
Vector ranks_from_assignment(const std::vector<int>& cols);

}  // namespace ecrm
