#include "ecrm/model.hpp"

#include <string>

namespace ecrm {

TrainedModel fit(const KernelSpec& spec, double lambda, Matrix inputs,
                 std::shared_ptr<const Matrix> labels, OutputSpace space,
                 InterceptMode intercept) {
  if (!labels) throw InputError("missing training labels");
  if (labels->rows() != inputs.rows())
    throw InputError("got " + std::to_string(inputs.rows()) + " inputs but " +
                     std::to_string(labels->rows()) + " labels");
  if (labels->cols() != space.dim())
    throw InputError("labels have " + std::to_string(labels->cols()) + " entries, the " +
                     to_string(space.kind()) + " space expects " + std::to_string(space.dim()));
  return TrainedModel{KernelRidge<double>(spec, lambda, std::move(inputs), intercept),
                      std::move(labels), std::move(space)};
}

TrainedModel fit(const KernelSpec& spec, double lambda, Matrix inputs, Matrix labels,
                 OutputSpace space, InterceptMode intercept) {
  return fit(spec, lambda, std::move(inputs), std::make_shared<const Matrix>(std::move(labels)),
             std::move(space), intercept);
}

void validate_labels(const Matrix& labels, const OutputSpace& space) {
  if (labels.cols() != space.dim())
    throw InputError("labels have " + std::to_string(labels.cols()) + " entries, the " +
                     to_string(space.kind()) + " space expects " + std::to_string(space.dim()));
  for (Eigen::Index i = 0; i < labels.rows(); ++i)
    if (!is_feasible(space, labels.row(i).transpose()))
      throw InputError("label " + std::to_string(i + 1) + " is not a feasible " +
                       to_string(space.kind()) + " output");
}

WeightVector weights(const TrainedModel& model, const Vector& x) {
  if (x.size() != model.ridge.dim())
    throw InputError("query has " + std::to_string(x.size()) + " features, model expects " +
                     std::to_string(model.ridge.dim()));
  return {model.ridge.weights(x), x};
}

double estimate_conditional_risk(const TrainedModel& model, const LossSpec& loss, const Vector& y,
                                 const Vector& x) {
  if (!is_feasible(model.space, y)) throw InputError("output is not feasible for the model's space");
  return weighted_risk(loss, y, *model.labels, weights(model, x).w);
}

}  // namespace ecrm
