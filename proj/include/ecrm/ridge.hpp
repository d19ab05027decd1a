#pragma once

#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ecrm/common.hpp"
#include "ecrm/kernel.hpp"

namespace ecrm {

enum class InterceptMode { none, centered };

std::string to_string(InterceptMode mode);
InterceptMode parse_intercept_mode(const std::string& name);

/// Kernel ridge smoother over a fixed set of training inputs.
///
/// Holds the Cholesky factor of K + m*lambda*I. Every per-target ridge fit
/// shares this matrix, so a query only needs the weight vector
/// w(x) = (K + m*lambda*I)^{-1} v(x); the prediction for any target series
/// L is then L^T w(x).
///
/// With InterceptMode::centered each target series is centered on its
/// training mean before the solve and the mean is added back afterwards.
/// That is the same as reweighting with w_i + (1 - sum_k w_k) / m, which is
/// what weights() returns in that mode.
///
/// Immutable after construction; concurrent weights() calls are safe.
template <typename Scalar>
class KernelRidge {
 public:
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  KernelRidge(const KernelSpec& spec, Scalar lambda, MatrixType inputs,
              InterceptMode intercept = InterceptMode::none)
      : spec_(spec), lambda_(lambda), inputs_(std::move(inputs)), intercept_(intercept) {
    spec_.validate();
    if (!(lambda_ > Scalar(0)) || !std::isfinite(static_cast<double>(lambda_)))
      throw InputError("lambda must be a positive finite number");
    if (inputs_.rows() < 1) throw InputError("need at least one training input");
    if (!inputs_.allFinite()) throw InputError("training inputs contain non-finite values");

    const Eigen::Index m = inputs_.rows();
    MatrixType system = gram_matrix(spec_, inputs_);
    const Scalar trace = system.trace();
    system.diagonal().array() += Scalar(m) * lambda_;
    if (!system.allFinite()) throw NumericalError("kernel matrix has non-finite entries");
    factor_.compute(system);
    if (factor_.info() != Eigen::Success || !factor_.matrixLLT().allFinite()) {
      jitter_ = Scalar(1e-10) * trace / Scalar(m);
      system.diagonal().array() += jitter_;
      factor_.compute(system);
      if (factor_.info() != Eigen::Success || !factor_.matrixLLT().allFinite())
        throw NumericalError("Cholesky factorization of K + m*lambda*I failed");
    }
  }

  /// Solution of (K + m*lambda*I) w = v(x), without any intercept correction.
  template <typename Derived>
  VectorType raw_weights(const Eigen::MatrixBase<Derived>& x) const {
    return factor_.solve(kernel_vector(spec_, inputs_, x));
  }

  /// Weights to apply to per-sample losses; includes the centering
  /// correction when the intercept is modelled.
  template <typename Derived>
  VectorType weights(const Eigen::MatrixBase<Derived>& x) const {
    VectorType w = raw_weights(x);
    if (intercept_ == InterceptMode::centered) {
      const Scalar shift = (Scalar(1) - w.sum()) / Scalar(w.size());
      w.array() += shift;
    }
    return w;
  }

  const KernelSpec& kernel() const { return spec_; }
  Scalar lambda() const { return lambda_; }
  InterceptMode intercept() const { return intercept_; }
  const MatrixType& inputs() const { return inputs_; }
  Eigen::Index size() const { return inputs_.rows(); }
  Eigen::Index dim() const { return inputs_.cols(); }
  const Eigen::LLT<MatrixType>& factor() const { return factor_; }
  /// Diagonal jitter added after a failed first factorization (0 if none).
  Scalar jitter() const { return jitter_; }

 private:
  KernelSpec spec_;
  Scalar lambda_;
  MatrixType inputs_;
  InterceptMode intercept_;
  Eigen::LLT<MatrixType> factor_;
  Scalar jitter_ = Scalar(0);
};

}  // namespace ecrm
