#include "ecrm/inference.hpp"

#include <algorithm>
#include <string>

#include "ecrm/assignment.hpp"
#include "ecrm/closure.hpp"
#include "ecrm/flow_solvers.hpp"

namespace ecrm {

InferenceResult brute_force_argmin(const OutputSpace& space,
                                   const std::function<double(const Vector&)>& objective,
                                   std::size_t cap) {
  const auto outputs = enumerate_space(space, cap);
  if (outputs.empty()) throw InputError("output space is empty");
  std::size_t best = 0;
  double best_f = objective(outputs[0]);
  for (std::size_t k = 1; k < outputs.size(); ++k) {
    const double f = objective(outputs[k]);
    if (f < best_f || (f == best_f && lex_less(outputs[k], outputs[best]))) {
      best = k;
      best_f = f;
    }
  }
  return {outputs[best], best_f, Certificate::exact()};
}

Vector smallest_output(const OutputSpace& space) {
  switch (space.kind()) {
    case SpaceKind::hierarchy:
      return Vector::Zero(space.dim());
    case SpaceKind::assignment:
      return Vector::LinSpaced(space.dim(), 1.0, static_cast<double>(space.dim()));
    case SpaceKind::explicit_finite:
      return *std::min_element(space.points().begin(), space.points().end(), lex_less);
    case SpaceKind::flow_polytope:
      break;
  }
  throw InputError("no smallest output for a continuous space");
}

LossSpec default_loss(const OutputSpace& space) {
  switch (space.kind()) {
    case SpaceKind::hierarchy: return LossSpec::hamming();
    case SpaceKind::assignment: return LossSpec::footrule();
    case SpaceKind::flow_polytope: return LossSpec::absolute();
    case SpaceKind::explicit_finite: return LossSpec::zero_one();
  }
  return LossSpec::zero_one();
}

InferenceResult infer(const Vector& weights, const Matrix& labels, const LossSpec& loss,
                      const OutputSpace& space, const SolverParams& params) {
  params.validate();
  if (labels.rows() != weights.size())
    throw InputError("got " + std::to_string(weights.size()) + " weights for " +
                     std::to_string(labels.rows()) + " labels");
  if (labels.cols() != space.dim())
    throw InputError("labels have " + std::to_string(labels.cols()) + " entries, the " +
                     to_string(space.kind()) + " space expects " + std::to_string(space.dim()));
  if (!weights.allFinite()) throw NumericalError("non-finite weights");

  const auto risk = [&](const Vector& y) { return weighted_risk(loss, y, labels, weights); };

  switch (space.kind()) {
    case SpaceKind::flow_polytope:
      if (loss.kind == LossKind::absolute)
        return solve_flow_abs(weights, labels, space.network(), params);
      if (loss.kind == LossKind::square)
        return solve_flow_sq(weights, labels, space.network(), params);
      throw UnsupportedError("flow outputs need the absolute or square loss, got " +
                             to_string(loss.kind));
    default:
      break;
  }

  if ((weights.array() == 0.0).all()) return {smallest_output(space), 0.0, Certificate::exact()};

  if (space.is_binary_sign() && loss.kind == LossKind::zero_one) {
    // R(+1) - R(-1) = -sum_i w_i y_i, so +1 iff the signed sum is >= 0.
    double s = 0.0;
    for (Eigen::Index i = 0; i < labels.rows(); ++i) s += weights[i] * labels(i, 0);
    Vector y(1);
    y[0] = s >= 0.0 ? 1.0 : -1.0;
    return {y, risk(y), Certificate::exact()};
  }

  if (space.kind() == SpaceKind::hierarchy &&
      (loss.kind == LossKind::hamming || loss.kind == LossKind::hierarchical)) {
    if (loss.kind == LossKind::hierarchical && loss.hierarchy->size() != space.dim())
      throw InputError("hierarchical loss and output space have different node counts");
    const auto ac = additive_coefficients(loss, labels, weights);
    Vector y = solve_hierarchy(ac.coefficients, space.dag());
    const double obj = ac.coefficients.dot(y) + ac.offset;
    return {std::move(y), obj, Certificate::exact()};
  }

  if (space.kind() == SpaceKind::assignment && loss.kind == LossKind::footrule) {
    const int d = space.dim();
    const auto ac = additive_coefficients(loss, labels, weights);
    const Matrix cost =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            ac.coefficients.data(), d, d);
    const auto cols = solve_assignment(cost);
    return {ranks_from_assignment(cols), assignment_cost(cost, cols) + ac.offset,
            Certificate::exact()};
  }

  if (space.kind() == SpaceKind::explicit_finite)
    return brute_force_argmin(space, risk, params.enumeration_cap);
  try {
    return brute_force_argmin(space, risk, params.enumeration_cap);
  } catch (const InputError& e) {
    throw UnsupportedError("no solver for " + to_string(loss.kind) + " loss on a " +
                           to_string(space.kind()) + " space (" + e.what() + ")");
  }
}

InferenceResult infer(const TrainedModel& model, const LossSpec& loss, const Vector& x,
                      const SolverParams& params) {
  return infer(weights(model, x).w, *model.labels, loss, model.space, params);
}

}  // namespace ecrm
