#pragma once

#include <cstdint>
#include <functional>

#include "ecrm/common.hpp"
#include "ecrm/losses.hpp"
#include "ecrm/model.hpp"
#include "ecrm/output_space.hpp"
#include "ecrm/solver_types.hpp"

namespace ecrm {

/// min_y'' R(y''|x) - R(y'|x) for the estimated risk with weights w. Always <= 0.
double delta(const Vector& weights, const Matrix& labels, const LossSpec& loss,
             const OutputSpace& space, const Vector& yp, const SolverParams& params = {});
double delta(const TrainedModel& model, const LossSpec& loss, const Vector& yp, const Vector& x,
             const SolverParams& params = {});

struct SurrogateConfig {
  double rho = 1.0;
  double bound = 1.0;  // L, the cap of Phi

  void validate() const;
};

struct SurrogateValue {
  double value = 0.0;
  Vector maximizer;  // the y' attaining the inner max
  Certificate certificate;
};

/// Phi(max_y' { l(y', y) + Delta(y', x) / rho }) with Phi(a) = min(a, L).
///
/// The inner max is min_y' R(y'|x)/rho minus the minimum of
/// sum_i (w_i / rho) l(y', y_i) - l(y', y), which is again an estimated-risk
/// minimization over the same space (one extra label with weight -1) and goes
/// through infer().
SurrogateValue surrogate_loss(const Vector& weights, const Matrix& labels, const LossSpec& loss,
                              const OutputSpace& space, const SurrogateConfig& cfg,
                              const Vector& y, const SolverParams& params = {});
SurrogateValue surrogate_loss(const TrainedModel& model, const LossSpec& loss,
                              const SurrogateConfig& cfg, const Vector& x, const Vector& y,
                              const SolverParams& params = {});

/// Mean surrogate loss over the rows of (X, Y).
double empirical_surrogate_risk(const TrainedModel& model, const LossSpec& loss,
                                const SurrogateConfig& cfg, const Matrix& X, const Matrix& Y,
                                const SolverParams& params = {});

/// Among the minimizers of the estimated risk, one with the highest loss
/// against y. Exhaustive for enumerable spaces (ties are exact equality);
/// otherwise the plain infer() minimizer.
Vector loss_maximizing_minimizer(const Vector& weights, const Matrix& labels,
                                 const LossSpec& loss, const OutputSpace& space, const Vector& y,
                                 const SolverParams& params = {});

struct BoundInputs {
  double empirical_risk = 0.0;  // empirical surrogate risk
  double loss_bound = 1.0;      // L
  double kappa = 1.0;           // sup_x k(x, x)
  double lambda = 1.0;
  double rho = 1.0;
  double delta = 0.05;
  double m = 1.0;

  void validate() const;
};

struct BoundTerms {
  double nu = 0.0;
  double empirical = 0.0;
  double complexity = 0.0;  // 4 L nu / (rho m)
  double confidence = 0.0;  // L (8 nu / rho + 1) sqrt(ln(1/delta) / (2 m))
  double total = 0.0;
};

BoundTerms generalization_bound_terms(const BoundInputs& b);
double generalization_bound(const BoundInputs& b);

/// Draws n outputs from Y | X = x.
using ConditionalSampler =
    std::function<Matrix(const Vector& x, int n, std::uint64_t seed)>;

/// Monte-Carlo estimate of min_y E[l(y, Y) | x]: the n_mc draws get equal
/// weights 1/n_mc and the minimization goes through infer(). The returned
/// objective is the estimate; y is its minimizer.
InferenceResult bayes_conditional_risk(const ConditionalSampler& sampler, const Vector& x,
                                       const LossSpec& loss, const OutputSpace& space,
                                       int n_mc = 20000, std::uint64_t seed = 0,
                                       const SolverParams& params = {});

}  // namespace ecrm
