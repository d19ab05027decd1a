#pragma once

#include "ecrm/common.hpp"
#include "ecrm/kernel.hpp"
#include "ecrm/losses.hpp"
#include "ecrm/output_space.hpp"
#include "ecrm/ridge.hpp"
#include "ecrm/solver_types.hpp"

namespace ecrm {

/// Indices of the k nearest rows of X to x (Euclidean; ties by index).
std::vector<int> nearest_neighbors(const Matrix& X, const Vector& x, int k);

/// argmin_y sum over the k nearest samples of l(y, y_i): infer() with weight
/// 1/k on the neighbours and 0 elsewhere.
InferenceResult knn_local_risk_predict(const Matrix& X, const Matrix& labels,
                                       const LossSpec& loss, const OutputSpace& space,
                                       const Vector& x, int k, const SolverParams& params = {});

/// Coordinatewise kernel ridge prediction of the output vector, projected
/// onto the flow polytope in Euclidean norm.
class KrrProjector {
 public:
  KrrProjector(const KernelSpec& kernel, double lambda, Matrix X, Matrix labels,
               OutputSpace space, InterceptMode intercept = InterceptMode::none);

  Vector raw_prediction(const Vector& x) const;
  /// Projection gap <= gap_tol on 0.5 |y - yhat|^2.
  InferenceResult predict(const Vector& x, double gap_tol = 1e-6) const;

 private:
  KernelRidge<double> ridge_;
  Matrix labels_;
  OutputSpace space_;
};

InferenceResult krr_project_predict(const Matrix& X, const Matrix& labels,
                                    const OutputSpace& space, const KernelSpec& kernel,
                                    double lambda, const Vector& x);

}  // namespace ecrm
