#pragma once

#include <optional>
#include <vector>

#include "ecrm/common.hpp"

namespace ecrm {

struct FlowArc {
  int tail = 0;
  int head = 0;
};

/// Directed network with external inflows b. A flow y (one entry per arc) is
/// feasible when y >= 0 and, at every node j,
///   sum_{out(j)} y - sum_{in(j)} y = b_j.
class FlowNetwork {
 public:
  FlowNetwork() = default;
  /// Rejects bad node ids, a supply vector of the wrong length, and supplies
  /// that do not sum to zero. Cycles are allowed here; solvers check for them.
  FlowNetwork(int node_count, std::vector<FlowArc> arcs, Vector supply);

  /// The six-node, ten-arc benchmark network with unit supply at node 0 and
  /// unit demand at node 5.
  static FlowNetwork benchmark();

  int node_count() const { return node_count_; }
  int arc_count() const { return static_cast<int>(arcs_.size()); }
  const std::vector<FlowArc>& arcs() const { return arcs_; }
  const Vector& supply() const { return supply_; }
  const std::vector<int>& out_arcs(int node) const { return out_[node]; }
  const std::vector<int>& in_arcs(int node) const { return in_[node]; }

  bool is_acyclic() const { return order_.has_value(); }
  /// Node order with every arc pointing forward; throws InputError if cyclic.
  const std::vector<int>& topological_order() const;

  /// Source and sink for a unit single-commodity network (b_s = 1, b_t = -1,
  /// zero elsewhere); throws InputError otherwise.
  int source() const;
  int sink() const;
  bool has_unit_terminals() const;

  /// Per-node residual out - in - b.
  Vector divergence_residual(const Vector& y) const;

 private:
  int node_count_ = 0;
  std::vector<FlowArc> arcs_;
  Vector supply_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::optional<std::vector<int>> order_;
  int source_ = -1;
  int sink_ = -1;
};

}  // namespace ecrm
