#pragma once

#include <vector>

#include "ecrm/common.hpp"
#include "ecrm/hierarchy.hpp"

namespace ecrm {

/// Dinic max-flow on real capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int node_count, double eps = 1e-12);

  void add_edge(int from, int to, double capacity);
  double solve(int source, int sink);

  /// Nodes reachable from the source in the final residual graph.
  std::vector<char> source_side(int source) const;
  /// Nodes that can still reach the sink in the final residual graph.
  std::vector<char> reaches_sink(int sink) const;

 private:
  struct Edge {
    int to;
    int rev;
    double cap;
  };
  bool bfs(int s, int t);
  double dfs(int v, int t, double pushed);

  std::vector<std::vector<Edge>> graph_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
  double eps_;
};

/// Exact minimizer of c^T y over {y in {0,1}^d : y_child <= y_parent}.
///
/// The hierarchy constraint matrix is totally unimodular, so this integer
/// program has the same optimum as its LP relaxation. It is solved as a
/// maximum-weight closure (selected nodes must include their parents) via a
/// minimum s-t cut. Among optimal selections the lexicographically smallest
/// 0/1 vector is returned.
Vector solve_hierarchy(const Vector& costs, const HierarchyDag& dag);

}  // namespace ecrm
