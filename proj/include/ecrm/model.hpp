#pragma once

#include <memory>

#include "ecrm/common.hpp"
#include "ecrm/kernel.hpp"
#include "ecrm/losses.hpp"
#include "ecrm/output_space.hpp"
#include "ecrm/ridge.hpp"

namespace ecrm {

/// A fitted ECRM model: the ridge smoother over the training inputs plus the
/// training outputs the estimated risk is built from. Labels are shared, not
/// copied, so fitting costs the same for any output dimension.
struct TrainedModel {
  KernelRidge<double> ridge;
  std::shared_ptr<const Matrix> labels;
  OutputSpace space;

  Eigen::Index size() const { return ridge.size(); }
};

/// Factorizes K + m*lambda*I. Labels are taken as given; check them with
/// validate_labels when they come from an untrusted source.
TrainedModel fit(const KernelSpec& spec, double lambda, Matrix inputs,
                 std::shared_ptr<const Matrix> labels, OutputSpace space,
                 InterceptMode intercept = InterceptMode::none);
TrainedModel fit(const KernelSpec& spec, double lambda, Matrix inputs, Matrix labels,
                 OutputSpace space, InterceptMode intercept = InterceptMode::none);

/// Throws InputError naming the first row that is not a feasible output.
void validate_labels(const Matrix& labels, const OutputSpace& space);

struct WeightVector {
  Vector w;
  Vector query;
};

WeightVector weights(const TrainedModel& model, const Vector& x);

/// sum_i w_i(x) l(y, y_i).
double estimate_conditional_risk(const TrainedModel& model, const LossSpec& loss, const Vector& y,
                                 const Vector& x);

}  // namespace ecrm
