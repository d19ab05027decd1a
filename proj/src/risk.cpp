#include "ecrm/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ecrm/inference.hpp"

namespace ecrm {

double delta(const Vector& weights, const Matrix& labels, const LossSpec& loss,
             const OutputSpace& space, const Vector& yp, const SolverParams& params) {
  if (!is_feasible(space, yp)) throw InputError("delta: output is not feasible");
  const Vector best = infer(weights, labels, loss, space, params).y;
  return weighted_risk(loss, best, labels, weights) - weighted_risk(loss, yp, labels, weights);
}

double delta(const TrainedModel& model, const LossSpec& loss, const Vector& yp, const Vector& x,
             const SolverParams& params) {
  return delta(weights(model, x).w, *model.labels, loss, model.space, yp, params);
}

void SurrogateConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InputError("rho must be positive");
  if (!(bound >= 0.0) || !std::isfinite(bound)) throw InputError("loss bound must be >= 0");
}

namespace {

Certificate weaker(const Certificate& a, const Certificate& b) {
  if (a.kind == CertificateKind::heuristic || b.kind == CertificateKind::heuristic)
    return Certificate::heuristic();
  if (a.kind == CertificateKind::gap || b.kind == CertificateKind::gap)
    return Certificate::bounded(a.gap + b.gap);
  return Certificate::exact();
}

}  // namespace

SurrogateValue surrogate_loss(const Vector& weights, const Matrix& labels, const LossSpec& loss,
                              const OutputSpace& space, const SurrogateConfig& cfg,
                              const Vector& y, const SolverParams& params) {
  cfg.validate();
  if (!is_feasible(space, y)) throw InputError("surrogate: output is not feasible");
  const auto m = labels.rows();

  const bool tu_additive =
      (space.kind() == SpaceKind::hierarchy &&
       (loss.kind == LossKind::hamming || loss.kind == LossKind::hierarchical)) ||
      (space.kind() == SpaceKind::assignment && loss.kind == LossKind::footrule);
  if (space.is_discrete() && !tu_additive) {
    const auto outputs = enumerate_space(space, params.enumeration_cap);
    std::vector<double> risks(outputs.size());
    for (std::size_t k = 0; k < outputs.size(); ++k)
      risks[k] = weighted_risk(loss, outputs[k], labels, weights);
    const double min_risk = *std::min_element(risks.begin(), risks.end());
    std::size_t arg = 0;
    double raw = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < outputs.size(); ++k) {
      const double v = loss(outputs[k], y) + (min_risk - risks[k]) / cfg.rho;
      if (v > raw) {
        raw = v;
        arg = k;
      }
    }
    return {std::min(raw, cfg.bound), outputs[arg], Certificate::exact()};
  }

  const InferenceResult best = infer(weights, labels, loss, space, params);

  Matrix aug_labels(m + 1, labels.cols());
  aug_labels.topRows(m) = labels;
  aug_labels.row(m) = y.transpose();
  Vector aug_weights(m + 1);
  aug_weights.head(m) = weights / cfg.rho;
  aug_weights[m] = -1.0;
  const InferenceResult inner = infer(aug_weights, aug_labels, loss, space, params);

  // Evaluate at the maximizer directly so that y' = h(x) gives exactly l(y', y).
  const Vector& yp = inner.y;
  const double margin =
      weighted_risk(loss, best.y, labels, weights) - weighted_risk(loss, yp, labels, weights);
  double raw = loss(yp, y) + margin / cfg.rho;
  // The estimated minimizer is a candidate too; never report less than its value.
  raw = std::max(raw, loss(best.y, y));
  return {std::min(raw, cfg.bound), yp, weaker(best.certificate, inner.certificate)};
}

SurrogateValue surrogate_loss(const TrainedModel& model, const LossSpec& loss,
                              const SurrogateConfig& cfg, const Vector& x, const Vector& y,
                              const SolverParams& params) {
  return surrogate_loss(weights(model, x).w, *model.labels, loss, model.space, cfg, y, params);
}

double empirical_surrogate_risk(const TrainedModel& model, const LossSpec& loss,
                                const SurrogateConfig& cfg, const Matrix& X, const Matrix& Y,
                                const SolverParams& params) {
  if (X.rows() != Y.rows()) throw InputError("features and labels differ in row count");
  if (X.rows() == 0) throw InputError("empty evaluation set");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    sum += surrogate_loss(model, loss, cfg, X.row(i).transpose(), Y.row(i).transpose(), params)
               .value;
  return sum / static_cast<double>(X.rows());
}

Vector loss_maximizing_minimizer(const Vector& weights, const Matrix& labels,
                                 const LossSpec& loss, const OutputSpace& space, const Vector& y,
                                 const SolverParams& params) {
  if (!space.is_discrete()) return infer(weights, labels, loss, space, params).y;
  std::vector<Vector> outputs;
  try {
    outputs = enumerate_space(space, params.enumeration_cap);
  } catch (const InputError&) {
    return infer(weights, labels, loss, space, params).y;
  }
  const Vector h = infer(weights, labels, loss, space, params).y;
  const double min_risk = weighted_risk(loss, h, labels, weights);
  Vector best = h;
  double best_loss = loss(h, y);
  for (const Vector& v : outputs) {
    if (weighted_risk(loss, v, labels, weights) != min_risk) continue;
    const double l = loss(v, y);
    if (l > best_loss) {
      best = v;
      best_loss = l;
    }
  }
  return best;
}

void BoundInputs::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  if (!(m >= 1.0)) throw InputError("m must be at least 1");
  if (!(rho > 0.0)) throw InputError("rho must be positive");
  if (!(kappa > 0.0)) throw InputError("kappa must be positive");
  if (!(loss_bound >= 0.0)) throw InputError("loss bound must be nonnegative");
  if (!std::isfinite(empirical_risk)) throw InputError("empirical risk must be finite");
}

BoundTerms generalization_bound_terms(const BoundInputs& b) {
  b.validate();
  BoundTerms t;
  const double r = b.kappa / b.lambda;
  t.nu = r + std::pow(r, 1.5);
  t.empirical = b.empirical_risk;
  t.complexity = 4.0 * b.loss_bound * t.nu / (b.rho * b.m);
  t.confidence = b.loss_bound * (8.0 * t.nu / b.rho + 1.0) *
                 std::sqrt(std::log(1.0 / b.delta) / (2.0 * b.m));
  t.total = t.empirical + t.complexity + t.confidence;
  return t;
}

double generalization_bound(const BoundInputs& b) { return generalization_bound_terms(b).total; }

InferenceResult bayes_conditional_risk(const ConditionalSampler& sampler, const Vector& x,
                                       const LossSpec& loss, const OutputSpace& space, int n_mc,
                                       std::uint64_t seed, const SolverParams& params) {
  if (n_mc < 1) throw InputError("need at least one Monte-Carlo draw");
  const Matrix draws = sampler(x, n_mc, seed);
  if (draws.rows() != n_mc) throw InputError("sampler returned the wrong number of draws");
  const Vector w = Vector::Constant(n_mc, 1.0 / n_mc);
  return infer(w, draws, loss, space, params);
}

}  // namespace ecrm
