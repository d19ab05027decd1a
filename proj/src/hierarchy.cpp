#include "ecrm/hierarchy.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "ecrm/common.hpp"

namespace ecrm {

HierarchyDag::HierarchyDag(int node_count, std::vector<Arc> arcs)
    : node_count_(node_count), arcs_(std::move(arcs)) {
  if (node_count_ < 1) throw InputError("hierarchy needs at least one node");
  parents_.assign(node_count_, {});
  children_.assign(node_count_, {});
  std::set<Arc> seen;
  for (const auto& [p, c] : arcs_) {
    if (p < 0 || c < 0 || p >= node_count_ || c >= node_count_)
      throw InputError("hierarchy arc (" + std::to_string(p) + ", " + std::to_string(c) +
                       ") references a node outside 0.." + std::to_string(node_count_ - 1));
    if (p == c) throw InputError("hierarchy contains a cycle: self-loop at node " +
                                 std::to_string(p));
    if (!seen.insert({p, c}).second)
      throw InputError("duplicate hierarchy arc (" + std::to_string(p) + ", " +
                       std::to_string(c) + ")");
    parents_[c].push_back(p);
    children_[p].push_back(c);
  }
  for (auto& v : parents_) std::sort(v.begin(), v.end());
  for (auto& v : children_) std::sort(v.begin(), v.end());

  // Kahn's algorithm, smallest ready id first so the order is canonical.
  std::vector<int> indegree(node_count_);
  for (int j = 0; j < node_count_; ++j) indegree[j] = static_cast<int>(parents_[j].size());
  std::set<int> ready;
  for (int j = 0; j < node_count_; ++j)
    if (indegree[j] == 0) ready.insert(j);
  while (!ready.empty()) {
    const int j = *ready.begin();
    ready.erase(ready.begin());
    order_.push_back(j);
    for (int c : children_[j])
      if (--indegree[c] == 0) ready.insert(c);
  }
  if (static_cast<int>(order_.size()) != node_count_)
    throw InputError("hierarchy contains a cycle");
}

HierarchyDag HierarchyDag::from_parents(const std::vector<int>& parent) {
  std::vector<Arc> arcs;
  for (int j = 0; j < static_cast<int>(parent.size()); ++j)
    if (parent[j] >= 0) arcs.emplace_back(parent[j], j);
  return HierarchyDag(static_cast<int>(parent.size()), std::move(arcs));
}

std::vector<int> HierarchyDag::roots() const {
  std::vector<int> r;
  for (int j = 0; j < node_count_; ++j)
    if (parents_[j].empty()) r.push_back(j);
  return r;
}

std::vector<int> HierarchyDag::ancestors(int j) const {
  std::vector<char> mark(node_count_, 0);
  std::vector<int> stack(parents_[j].begin(), parents_[j].end());
  while (!stack.empty()) {
    const int k = stack.back();
    stack.pop_back();
    if (mark[k]) continue;
    mark[k] = 1;
    for (int p : parents_[k]) stack.push_back(p);
  }
  std::vector<int> out;
  for (int k = 0; k < node_count_; ++k)
    if (mark[k]) out.push_back(k);
  return out;
}

bool HierarchyDag::is_arborescence() const {
  int root_count = 0;
  for (int j = 0; j < node_count_; ++j) {
    if (parents_[j].empty())
      ++root_count;
    else if (parents_[j].size() > 1)
      return false;
  }
  // Acyclic, one root, every other node with one parent: connected tree.
  return root_count == 1;
}

int HierarchyDag::root() const {
  if (!is_arborescence()) throw InputError("hierarchy is not an arborescence");
  return roots().front();
}

}  // namespace ecrm
