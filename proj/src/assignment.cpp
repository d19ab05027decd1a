#include "ecrm/assignment.hpp"

#include <limits>
#include <string>

namespace ecrm {

namespace {

struct Hungarian {
  std::vector<int> cols;  // column of each row
  Vector row_potential;
  Vector col_potential;
};

// Shortest augmenting paths with potentials; rows are added one at a time.
Hungarian hungarian(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Hungarian h;
  h.cols.assign(n, -1);
  for (int j = 1; j <= n; ++j) h.cols[p[j] - 1] = j - 1;
  h.row_potential = Eigen::Map<Vector>(u.data() + 1, n);
  h.col_potential = Eigen::Map<Vector>(v.data() + 1, n);
  return h;
}

// Optimum with some rows pinned to columns; returns the full assignment.
std::vector<int> solve_pinned(const Matrix& cost, const std::vector<int>& pinned) {
  const int d = static_cast<int>(cost.rows());
  std::vector<char> col_taken(d, 0);
  std::vector<int> free_rows, free_cols;
  for (int j = 0; j < d; ++j)
    if (pinned[j] >= 0) col_taken[pinned[j]] = 1;
  for (int j = 0; j < d; ++j) {
    if (pinned[j] < 0) free_rows.push_back(j);
    if (!col_taken[j]) free_cols.push_back(j);
  }
  std::vector<int> out = pinned;
  if (free_rows.empty()) return out;
  Matrix sub(free_rows.size(), free_cols.size());
  for (std::size_t r = 0; r < free_rows.size(); ++r)
    for (std::size_t c = 0; c < free_cols.size(); ++c) sub(r, c) = cost(free_rows[r], free_cols[c]);
  const Hungarian h = hungarian(sub);
  for (std::size_t r = 0; r < free_rows.size(); ++r) out[free_rows[r]] = free_cols[h.cols[r]];
  return out;
}

}  // namespace

double assignment_cost(const Matrix& cost, const std::vector<int>& cols) {
  double total = 0.0;
  for (std::size_t j = 0; j < cols.size(); ++j) total += cost(static_cast<Eigen::Index>(j), cols[j]);
  return total;
}

Vector ranks_from_assignment(const std::vector<int>& cols) {
  Vector r(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) r[static_cast<Eigen::Index>(j)] = cols[j] + 1;
  return r;
}

std::vector<int> solve_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols())
    throw InputError("assignment cost matrix must be square, got " +
                     std::to_string(cost.rows()) + "x" + std::to_string(cost.cols()));
  if (cost.rows() == 0) return {};
  if (!cost.allFinite()) throw InputError("assignment cost matrix has non-finite entries");
  const int d = static_cast<int>(cost.rows());

  const Hungarian base = hungarian(cost);
  const double opt = assignment_cost(cost, base.cols);
  const double scale = 1.0 + static_cast<double>(d) * cost.cwiseAbs().maxCoeff();
  const double tol = 1e-12 * scale;

  // Lexicographic tie-break: pin rows in order to the smallest column that
  // still admits an optimal completion. A matching through (j,k) costs at
  // least opt + reduced_cost(j,k), so most candidates are ruled out without
  // another solve.
  std::vector<int> current = base.cols;
  std::vector<int> pinned(d, -1);
  std::vector<char> col_used(d, 0);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      if (col_used[k]) continue;
      if (k == current[j]) break;
      const double reduced = cost(j, k) - base.row_potential[j] - base.col_potential[k];
      if (reduced > tol) continue;
      pinned[j] = k;
      std::vector<int> trial = solve_pinned(cost, pinned);
      if (assignment_cost(cost, trial) <= opt + tol) {
        current = std::move(trial);
        break;
      }
      pinned[j] = -1;
    }
    pinned[j] = current[j];
    col_used[current[j]] = 1;
  }
  return current;
}

}  // namespace ecrm
