#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "ecrm/common.hpp"

namespace ecrm {

enum class KernelKind { linear, rbf };

/// Kernel family plus its bandwidth. For rbf, k(x,x') = exp(-gamma * |x-x'|^2).
struct KernelSpec {
  KernelKind kind = KernelKind::rbf;
  double gamma = 1.0;

  static KernelSpec linear() { return {KernelKind::linear, 0.0}; }
  static KernelSpec rbf(double gamma) { return {KernelKind::rbf, gamma}; }

  void validate() const {
    if (kind == KernelKind::rbf && !(gamma > 0.0 && std::isfinite(gamma)))
      throw InputError("rbf kernel needs gamma > 0");
  }
};

std::string to_string(KernelKind kind);
KernelKind parse_kernel_kind(const std::string& name);

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar eval_kernel(const KernelSpec& spec,
                                      const Eigen::MatrixBase<DerivedA>& x,
                                      const Eigen::MatrixBase<DerivedB>& xp) {
  using Scalar = typename DerivedA::Scalar;
  if (x.size() != xp.size())
    throw InputError("kernel arguments differ in dimension: " + std::to_string(x.size()) +
                     " vs " + std::to_string(xp.size()));
  switch (spec.kind) {
    case KernelKind::linear:
      return x.dot(xp);
    case KernelKind::rbf: {
      const Scalar sq = (x - xp).squaredNorm();
      return std::exp(-Scalar(spec.gamma) * sq);
    }
  }
  return Scalar(0);
}

/// Gram matrix over the rows of X. Only the upper triangle is evaluated and
/// mirrored, so the result is exactly symmetric.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> gram_matrix(
    const KernelSpec& spec, const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index m = X.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> K(m, m);
  if (spec.kind == KernelKind::linear) {
    K.template triangularView<Eigen::Upper>() = X * X.transpose();
  } else {
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const Scalar sq = (X.row(i) - X.row(j)).squaredNorm();
        K(i, j) = std::exp(-Scalar(spec.gamma) * sq);
      }
      K(j, j) = Scalar(1);
    }
  }
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = j + 1; i < m; ++i) K(i, j) = K(j, i);
  return K;
}

/// v(x) = [k(x, x_i)]_i over the rows of X.
template <typename DerivedX, typename DerivedQ>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> kernel_vector(
    const KernelSpec& spec, const Eigen::MatrixBase<DerivedX>& X,
    const Eigen::MatrixBase<DerivedQ>& x) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != X.cols())
    throw InputError("query has dimension " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(X.cols()));
  if (spec.kind == KernelKind::linear) return X * x;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    v[i] = std::exp(-Scalar(spec.gamma) * (X.row(i).transpose() - x).squaredNorm());
  return v;
}

/// Upper bound on k(x,x) over a set of inputs (exactly 1 for rbf).
template <typename Derived>
typename Derived::Scalar kernel_diagonal_bound(const KernelSpec& spec,
                                               const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  if (spec.kind == KernelKind::rbf) return Scalar(1);
  return X.rows() == 0 ? Scalar(0) : X.rowwise().squaredNorm().maxCoeff();
}

}  // namespace ecrm
