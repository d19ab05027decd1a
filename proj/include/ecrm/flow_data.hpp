#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ecrm/common.hpp"
#include "ecrm/flow_network.hpp"

namespace ecrm {

/// Discrete path-choice model on an acyclic network with a unit source and
/// sink. Path k gets utility u_k = theta_k . x + tau * g_k with g_k standard
/// Gumbel; the unit of flow is split over paths by softmax(u / tau_share) and
/// the arc flow is the sum over the paths using the arc.
struct FlowGeneratorSpec {
  FlowNetwork network;
  int input_dim = 20;
  Matrix theta;  // paths x input_dim
  double tau = 1.0;
  double tau_share = 1.0;

  void validate() const;
  int path_count() const { return static_cast<int>(theta.rows()); }
};

/// Draws theta from N(0, 1) with theta_seed. tau_share defaults to tau; a
/// share temperature of 0 sends all flow down the highest-utility path.
FlowGeneratorSpec make_flow_generator(FlowNetwork network = FlowNetwork::benchmark(),
                                      int input_dim = 20, double tau = 1.0,
                                      std::uint64_t theta_seed = 0,
                                      std::optional<double> tau_share = std::nullopt);

struct FlowDataset {
  Matrix X;  // m x input_dim, uniform on the unit cube
  Matrix Y;  // m x arcs
};

/// Sample i only depends on (seed, i).
FlowDataset simulate_flow_data(const FlowGeneratorSpec& spec, int m, std::uint64_t seed);

/// n draws of Y | X = x.
Matrix sample_flows(const FlowGeneratorSpec& spec, const Vector& x, int n, std::uint64_t seed);

}  // namespace ecrm
