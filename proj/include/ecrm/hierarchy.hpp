#pragma once

#include <utility>
#include <vector>

namespace ecrm {

/// Label hierarchy: arcs run parent -> child, node ids are 0-based.
/// Construction rejects self-loops, duplicate arcs, out-of-range ids and cycles.
class HierarchyDag {
 public:
  using Arc = std::pair<int, int>;  // (parent, child)

  HierarchyDag() = default;
  HierarchyDag(int node_count, std::vector<Arc> arcs);

  /// Arborescence with arcs parent[j] -> j; the root has parent -1.
  static HierarchyDag from_parents(const std::vector<int>& parent);

  int size() const { return node_count_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<int>& parents(int j) const { return parents_[j]; }
  const std::vector<int>& children(int j) const { return children_[j]; }
  std::vector<int> roots() const;
  /// Parents always precede children.
  const std::vector<int>& topological_order() const { return order_; }
  /// All proper ancestors of j, ascending.
  std::vector<int> ancestors(int j) const;

  /// Single root and exactly one parent for every other node.
  bool is_arborescence() const;
  /// Root of an arborescence; throws InputError otherwise.
  int root() const;

 private:
  int node_count_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::vector<int> order_;
};

}  // namespace ecrm
