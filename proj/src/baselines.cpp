#include "ecrm/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "ecrm/flow_solvers.hpp"
#include "ecrm/inference.hpp"

namespace ecrm {

std::vector<int> nearest_neighbors(const Matrix& X, const Vector& x, int k) {
  if (x.size() != X.cols())
    throw InputError("query has " + std::to_string(x.size()) + " features, data has " +
                     std::to_string(X.cols()));
  if (k < 1 || k > X.rows())
    throw InputError("k must lie in 1.." + std::to_string(X.rows()));
  const Vector dist = (X.rowwise() - x.transpose()).rowwise().squaredNorm();
  std::vector<int> idx(static_cast<std::size_t>(X.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return dist[a] < dist[b]; });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

InferenceResult knn_local_risk_predict(const Matrix& X, const Matrix& labels,
                                       const LossSpec& loss, const OutputSpace& space,
                                       const Vector& x, int k, const SolverParams& params) {
  if (labels.rows() != X.rows()) throw InputError("features and labels differ in row count");
  Vector w = Vector::Zero(X.rows());
  for (int i : nearest_neighbors(X, x, k)) w[i] = 1.0 / k;
  return infer(w, labels, loss, space, params);
}

KrrProjector::KrrProjector(const KernelSpec& kernel, double lambda, Matrix X, Matrix labels,
                           OutputSpace space, InterceptMode intercept)
    : ridge_(kernel, lambda, std::move(X), intercept),
      labels_(std::move(labels)),
      space_(std::move(space)) {
  if (space_.kind() != SpaceKind::flow_polytope)
    throw InputError("krr-project needs a flow output space");
  if (labels_.rows() != ridge_.size()) throw InputError("features and labels differ in row count");
  if (labels_.cols() != space_.dim()) throw InputError("labels do not match the network");
}

Vector KrrProjector::raw_prediction(const Vector& x) const {
  if (x.size() != ridge_.dim()) throw InputError("query has the wrong number of features");
  return labels_.transpose() * ridge_.weights(x);
}

InferenceResult KrrProjector::predict(const Vector& x, double gap_tol) const {
  const Vector yhat = raw_prediction(x);
  const auto proj = project_onto_flows(yhat, space_.network(), gap_tol, 1000000);
  InferenceResult r;
  r.y = proj.y;
  r.objective = 0.5 * (proj.y - yhat).squaredNorm();
  r.certificate = Certificate::bounded(proj.gap);
  return r;
}

InferenceResult krr_project_predict(const Matrix& X, const Matrix& labels,
                                    const OutputSpace& space, const KernelSpec& kernel,
                                    double lambda, const Vector& x) {
  return KrrProjector(kernel, lambda, X, labels, space).predict(x);
}

}  // namespace ecrm
