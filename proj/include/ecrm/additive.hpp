#pragma once

#include "ecrm/common.hpp"
#include "ecrm/hierarchy.hpp"
#include "ecrm/kernel.hpp"
#include "ecrm/solver_types.hpp"

namespace ecrm {

/// Per-node risk model for hierarchical multilabel outputs with the joint
/// kernel K((x, u, j), (x', u', k)) = k(x, x') 1(u = u') 1(j in N(k)).
///
/// N(k) is k plus its neighbours in the hierarchy (or just k). For node j
/// and value u in {0, 1}:
///   f(u, j, x) = sum_i sum_{k in N(j)} alpha_u(i, k) k(x, x_i)
/// and the risk estimate is sum_j f(y_j, j, x), affine in every y_j.
struct AdditiveModel {
  KernelSpec kernel;
  double lambda = 1.0;
  HierarchyDag dag;
  bool neighbors = true;
  Matrix inputs;
  Matrix alpha0;  // m x d
  Matrix alpha1;  // m x d

  /// 0/1 node-neighbourhood matrix (symmetric, unit diagonal).
  Matrix neighborhood() const;
};

/// Neighbourhood matrix of a hierarchy: adjacency in either direction plus I,
/// or I alone when neighbors is false.
Matrix neighborhood_matrix(const HierarchyDag& dag, bool neighbors);

/// Fits alpha to the per-node targets t(i, j, u) = 1(u != y_ij):
///   min_alpha sum_{i,j,u} (f(u, j, x_i) - t(i, j, u))^2 + lambda alpha^T |G| alpha
/// with G = K (x) N (x) I_2 the joint Gram matrix over the 2md basis
/// functions. G is indefinite in general, hence |G|. Solved in the
/// eigenbases of K and N; directions with zero eigenvalue get alpha = 0.
AdditiveModel fit_additive(const Matrix& inputs, const Matrix& labels, const HierarchyDag& dag,
                           const KernelSpec& kernel, double lambda, bool neighbors = true);

/// Value of the fitting objective at alpha.
double additive_objective(const AdditiveModel& model, const Matrix& labels, const Matrix& alpha0,
                          const Matrix& alpha1);

struct NodeScores {
  Vector off;  // f(0, j, x)
  Vector on;   // f(1, j, x)
};

NodeScores additive_node_scores(const AdditiveModel& model, const Vector& x);

double additive_risk(const AdditiveModel& model, const Vector& x, const Vector& y);

/// Exact minimizer of the (linear in y) additive risk over the hierarchy.
InferenceResult infer_additive(const AdditiveModel& model, const Vector& x);

}  // namespace ecrm
