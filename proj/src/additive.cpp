#include "ecrm/additive.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "ecrm/closure.hpp"

namespace ecrm {

Matrix neighborhood_matrix(const HierarchyDag& dag, bool neighbors) {
  Matrix A = Matrix::Identity(dag.size(), dag.size());
  if (neighbors)
    for (const auto& [p, c] : dag.arcs()) A(p, c) = A(c, p) = 1.0;
  return A;
}

Matrix AdditiveModel::neighborhood() const { return neighborhood_matrix(dag, neighbors); }

namespace {

void check_binary_labels(const Matrix& labels, const HierarchyDag& dag) {
  if (labels.cols() != dag.size())
    throw InputError("labels have " + std::to_string(labels.cols()) + " entries for " +
                     std::to_string(dag.size()) + " hierarchy nodes");
  for (Eigen::Index i = 0; i < labels.rows(); ++i)
    for (Eigen::Index j = 0; j < labels.cols(); ++j)
      if (labels(i, j) != 0.0 && labels(i, j) != 1.0)
        throw InputError("label " + std::to_string(i + 1) + " is not a 0/1 vector");
}

// alpha = U [ (U^T T V) .* S ] V^T with S_ab = sign(mu)/(|mu| + lambda), mu = kappa_a nu_b.
Matrix solve_block(const Eigen::SelfAdjointEigenSolver<Matrix>& ek,
                   const Eigen::SelfAdjointEigenSolver<Matrix>& ea, const Matrix& S,
                   const Matrix& targets) {
  const Matrix& U = ek.eigenvectors();
  const Matrix& V = ea.eigenvectors();
  const Matrix rotated = U.transpose() * targets * V;
  return U * rotated.cwiseProduct(S) * V.transpose();
}

}  // namespace

AdditiveModel fit_additive(const Matrix& inputs, const Matrix& labels, const HierarchyDag& dag,
                           const KernelSpec& kernel, double lambda, bool neighbors) {
  kernel.validate();
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be positive");
  if (inputs.rows() < 1) throw InputError("need at least one training input");
  if (inputs.rows() != labels.rows())
    throw InputError("got " + std::to_string(inputs.rows()) + " inputs but " +
                     std::to_string(labels.rows()) + " labels");
  check_binary_labels(labels, dag);

  AdditiveModel model{kernel, lambda, dag, neighbors, inputs, {}, {}};
  const Matrix K = gram_matrix(kernel, inputs);
  const Matrix A = model.neighborhood();
  const Eigen::SelfAdjointEigenSolver<Matrix> ek(K);
  const Eigen::SelfAdjointEigenSolver<Matrix> ea(A);
  if (ek.info() != Eigen::Success || ea.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the joint kernel failed");

  const Eigen::Index m = K.rows(), d = A.rows();
  const double scale = std::max(ek.eigenvalues().cwiseAbs().maxCoeff(), 1.0) *
                       std::max(ea.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
  const double zero_tol = 1e-12 * scale * static_cast<double>(m * d);
  Matrix S(m, d);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < d; ++b) {
      const double mu = ek.eigenvalues()[a] * ea.eigenvalues()[b];
      S(a, b) = std::abs(mu) <= zero_tol ? 0.0 : (mu > 0 ? 1.0 : -1.0) / (std::abs(mu) + lambda);
    }
  // Targets: value 0 is wrong where y = 1, value 1 is wrong where y = 0.
  const Matrix t0 = labels;
  const Matrix t1 = Matrix::Ones(m, d) - labels;
  model.alpha0 = solve_block(ek, ea, S, t0);
  model.alpha1 = solve_block(ek, ea, S, t1);
  if (!model.alpha0.allFinite() || !model.alpha1.allFinite())
    throw NumericalError("additive model produced non-finite coefficients");
  return model;
}

double additive_objective(const AdditiveModel& model, const Matrix& labels, const Matrix& alpha0,
                          const Matrix& alpha1) {
  const Matrix K = gram_matrix(model.kernel, model.inputs);
  const Matrix A = model.neighborhood();
  const Eigen::SelfAdjointEigenSolver<Matrix> ek(K);
  const Eigen::SelfAdjointEigenSolver<Matrix> ea(A);
  // |G| = |K (x) A| = (U (x) V) |diag(kappa (x) nu)| (U (x) V)^T.
  const Matrix absmu = ek.eigenvalues().cwiseAbs() * ea.eigenvalues().cwiseAbs().transpose();
  double value = 0.0;
  const Matrix targets[2] = {labels, Matrix::Ones(labels.rows(), labels.cols()) - labels};
  const Matrix* alphas[2] = {&alpha0, &alpha1};
  for (int u = 0; u < 2; ++u) {
    const Matrix& a = *alphas[u];
    value += (K * a * A - targets[u]).squaredNorm();
    const Matrix rot = ek.eigenvectors().transpose() * a * ea.eigenvectors();
    value += model.lambda * rot.cwiseAbs2().cwiseProduct(absmu).sum();
  }
  return value;
}

NodeScores additive_node_scores(const AdditiveModel& model, const Vector& x) {
  if (x.size() != model.inputs.cols())
    throw InputError("query has " + std::to_string(x.size()) + " features, model expects " +
                     std::to_string(model.inputs.cols()));
  const Vector v = kernel_vector(model.kernel, model.inputs, x);
  const Matrix A = model.neighborhood();
  return {A * (model.alpha0.transpose() * v), A * (model.alpha1.transpose() * v)};
}

double additive_risk(const AdditiveModel& model, const Vector& x, const Vector& y) {
  if (y.size() != model.dag.size()) throw InputError("output length does not match the hierarchy");
  for (Eigen::Index j = 0; j < y.size(); ++j)
    if (y[j] != 0.0 && y[j] != 1.0) throw InputError("output is not a 0/1 vector");
  for (const auto& [p, c] : model.dag.arcs())
    if (y[c] > y[p]) throw InputError("output violates the hierarchy");
  const NodeScores s = additive_node_scores(model, x);
  double r = 0.0;
  for (Eigen::Index j = 0; j < y.size(); ++j) r += y[j] != 0.0 ? s.on[j] : s.off[j];
  return r;
}

InferenceResult infer_additive(const AdditiveModel& model, const Vector& x) {
  const NodeScores s = additive_node_scores(model, x);
  const Vector c = s.on - s.off;
  Vector y = solve_hierarchy(c, model.dag);
  const double obj = s.off.sum() + c.dot(y);
  return {std::move(y), obj, Certificate::exact()};
}

}  // namespace ecrm
