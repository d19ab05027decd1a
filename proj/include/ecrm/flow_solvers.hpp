#pragma once

#include <cstddef>
#include <vector>

#include "ecrm/common.hpp"
#include "ecrm/flow_network.hpp"
#include "ecrm/solver_types.hpp"

namespace ecrm {

/// Linear minimization oracle over the unit s-t flow polytope of an acyclic
/// network: the indicator of a minimum-cost s-t path (costs may be
/// negative). Dynamic programming in topological order; ties go to the
/// incoming arc with the smaller index.
Vector lmo_flow(const Vector& costs, const FlowNetwork& net);

/// Indicators of every s-t path, depth-first with arcs tried in index order.
/// Throws InputError if there are more than cap paths.
std::vector<Vector> enumerate_paths(const FlowNetwork& net, std::size_t cap);

/// Number of arcs on the longest s-t path.
int longest_path_arcs(const FlowNetwork& net);

/// A feasible flow written as a convex combination of path indicators.
struct PathMixture {
  std::vector<Vector> vertices;
  std::vector<double> weights;

  Vector point(Eigen::Index arc_count) const;
};

/// Splits a feasible unit flow on an acyclic network into weighted paths.
PathMixture decompose_flow(const Vector& y, const FlowNetwork& net);

struct ProjectionResult {
  Vector y;
  double gap = 0.0;  // Frank-Wolfe gap of 0.5 * |y - target|^2 at y
  int iterations = 0;
};

/// Euclidean projection onto the flow polytope by pairwise Frank-Wolfe with
/// exact line search, stopped once the Frank-Wolfe gap is <= tol. When
/// `mixture` is given it is used as the starting point and updated in place.
ProjectionResult project_onto_flows(const Vector& target, const FlowNetwork& net, double tol,
                                    int max_iters, PathMixture* mixture = nullptr);

/// argmin_y sum_i w_i |y - y_i|_2^2 over the flow polytope.
InferenceResult solve_flow_sq(const Vector& weights, const Matrix& labels,
                              const FlowNetwork& net, const SolverParams& params = {});

/// argmin_y sum_i w_i |y - y_i|_1 over the flow polytope.
InferenceResult solve_flow_abs(const Vector& weights, const Matrix& labels,
                               const FlowNetwork& net, const SolverParams& params = {});

}  // namespace ecrm
