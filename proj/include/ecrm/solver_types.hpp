#pragma once

#include <cstddef>
#include <cstdint>

#include "ecrm/common.hpp"

namespace ecrm {

/// Minimizer of an estimated conditional risk and how much to trust it.
struct InferenceResult {
  Vector y;
  double objective = 0.0;
  Certificate certificate;
};

/// Knobs for the iterative (flow) solvers and the enumeration fallbacks.
/// The subgradient step is step_a / (1 + t * step_b) on the normalized
/// subgradient direction.
struct SolverParams {
  int max_iters = 500;
  double step_a = 1.0;
  double step_b = 0.1;
  double gap_tol = 1e-6;
  int restarts = 5;
  std::uint64_t seed = 0;
  std::size_t enumeration_cap = std::size_t{1} << 20;

  void validate() const;
};

}  // namespace ecrm
