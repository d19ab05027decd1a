#pragma once

#include <cstddef>
#include <functional>

#include "ecrm/common.hpp"
#include "ecrm/losses.hpp"
#include "ecrm/model.hpp"
#include "ecrm/output_space.hpp"
#include "ecrm/solver_types.hpp"

namespace ecrm {

/// argmin_y sum_i w_i l(y, labels.row(i)) over the space.
///
/// Hierarchies under hamming/hierarchical losses go through the closure
/// solver, assignments under the footrule through the assignment solver,
/// flows under absolute/square losses through the flow solvers, explicit
/// sets by enumeration. Any other discrete pair is enumerated when it fits
/// under params.enumeration_cap. Discrete ties go to the lexicographically
/// smallest encoding, except on {-1, +1} with the zero-one loss where +1
/// wins ties (sign rule).
InferenceResult infer(const Vector& weights, const Matrix& labels, const LossSpec& loss,
                      const OutputSpace& space, const SolverParams& params = {});

InferenceResult infer(const TrainedModel& model, const LossSpec& loss, const Vector& x,
                      const SolverParams& params = {});

/// Exhaustive argmin with lexicographic tie-breaking.
InferenceResult brute_force_argmin(const OutputSpace& space,
                                   const std::function<double(const Vector&)>& objective,
                                   std::size_t cap);

/// The lexicographically smallest feasible output of a discrete space.
Vector smallest_output(const OutputSpace& space);

/// Default loss for a space: hamming, footrule, absolute, zero-one.
LossSpec default_loss(const OutputSpace& space);

}  // namespace ecrm
