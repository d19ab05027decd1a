#include "ecrm/flow_network.hpp"

#include <cmath>
#include <string>

namespace ecrm {

FlowNetwork::FlowNetwork(int node_count, std::vector<FlowArc> arcs, Vector supply)
    : node_count_(node_count), arcs_(std::move(arcs)), supply_(std::move(supply)) {
  if (node_count_ < 1) throw InputError("network needs at least one node");
  if (supply_.size() != node_count_)
    throw InputError("network supply has " + std::to_string(supply_.size()) +
                     " entries for " + std::to_string(node_count_) + " nodes");
  if (!supply_.allFinite()) throw InputError("network supply contains non-finite values");
  const double scale = 1.0 + supply_.cwiseAbs().sum();
  if (std::abs(supply_.sum()) > 1e-9 * scale)
    throw InputError("network supplies b must sum to zero (sum is " +
                     std::to_string(supply_.sum()) + ")");
  out_.assign(node_count_, {});
  in_.assign(node_count_, {});
  for (int a = 0; a < arc_count(); ++a) {
    const auto [t, h] = arcs_[a];
    if (t < 0 || h < 0 || t >= node_count_ || h >= node_count_)
      throw InputError("arc " + std::to_string(a) + " references a node outside 0.." +
                       std::to_string(node_count_ - 1));
    out_[t].push_back(a);
    in_[h].push_back(a);
  }

  std::vector<int> indegree(node_count_, 0);
  for (const auto& arc : arcs_) ++indegree[arc.head];
  std::vector<int> order;
  std::vector<int> stack;
  for (int v = node_count_ - 1; v >= 0; --v)
    if (indegree[v] == 0) stack.push_back(v);
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int a : out_[v])
      if (--indegree[arcs_[a].head] == 0) stack.push_back(arcs_[a].head);
  }
  if (static_cast<int>(order.size()) == node_count_) order_ = std::move(order);

  int sources = 0, sinks = 0;
  bool unit = true;
  for (int v = 0; v < node_count_; ++v) {
    if (supply_[v] == 1.0) {
      source_ = v;
      ++sources;
    } else if (supply_[v] == -1.0) {
      sink_ = v;
      ++sinks;
    } else if (supply_[v] != 0.0) {
      unit = false;
    }
  }
  if (!unit || sources != 1 || sinks != 1) source_ = sink_ = -1;
}

FlowNetwork FlowNetwork::benchmark() {
  // s=0, upper-left=1, lower-left=2, upper-right=3, lower-right=4, t=5.
  std::vector<FlowArc> arcs = {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 4},
                               {1, 4}, {2, 3}, {3, 4}, {3, 5}, {4, 5}};
  Vector b = Vector::Zero(6);
  b[0] = 1.0;
  b[5] = -1.0;
  return FlowNetwork(6, std::move(arcs), std::move(b));
}

const std::vector<int>& FlowNetwork::topological_order() const {
  if (!order_) throw InputError("network contains a directed cycle");
  return *order_;
}

bool FlowNetwork::has_unit_terminals() const { return source_ >= 0; }

int FlowNetwork::source() const {
  if (source_ < 0) throw InputError("network does not have a single unit source and sink");
  return source_;
}

int FlowNetwork::sink() const {
  if (sink_ < 0) throw InputError("network does not have a single unit source and sink");
  return sink_;
}

Vector FlowNetwork::divergence_residual(const Vector& y) const {
  if (y.size() != arc_count())
    throw InputError("flow has " + std::to_string(y.size()) + " entries for " +
                     std::to_string(arc_count()) + " arcs");
  Vector r = -supply_;
  for (int a = 0; a < arc_count(); ++a) {
    r[arcs_[a].tail] += y[a];
    r[arcs_[a].head] -= y[a];
  }
  return r;
}

}  // namespace ecrm
