#include "ecrm/common.hpp"

#include <cmath>
#include <string>

#include "ecrm/kernel.hpp"
#include "ecrm/ridge.hpp"
#include "ecrm/solver_types.hpp"

namespace ecrm {

std::string to_string(const Certificate& c) {
  switch (c.kind) {
    case CertificateKind::exact:
      return "exact";
    case CertificateKind::gap:
      return "gap(" + std::to_string(c.gap) + ")";
    case CertificateKind::heuristic:
      return "heuristic";
  }
  return "unknown";
}

std::string to_string(KernelKind kind) {
  return kind == KernelKind::linear ? "linear" : "rbf";
}

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "rbf") return KernelKind::rbf;
  throw InputError("unknown kernel '" + name + "' (expected linear or rbf)");
}

std::string to_string(InterceptMode mode) {
  return mode == InterceptMode::none ? "none" : "centered";
}

InterceptMode parse_intercept_mode(const std::string& name) {
  if (name == "none") return InterceptMode::none;
  if (name == "centered") return InterceptMode::centered;
  throw InputError("unknown intercept mode '" + name + "' (expected none or centered)");
}

void SolverParams::validate() const {
  if (max_iters < 0) throw InputError("max_iters must be nonnegative");
  if (!(step_a > 0.0) || !std::isfinite(step_a)) throw InputError("step_a must be positive");
  if (!(step_b >= 0.0) || !std::isfinite(step_b)) throw InputError("step_b must be nonnegative");
  if (!(gap_tol > 0.0)) throw InputError("gap tolerance must be positive");
  if (restarts < 1) throw InputError("restarts must be at least 1");
  if (enumeration_cap < 1) throw InputError("enumeration cap must be positive");
}

}  // namespace ecrm
