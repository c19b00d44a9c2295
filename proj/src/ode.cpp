#include "curved3b/ode.hpp"

#include <array>
#include <string>

#include <fmt/format.h>

namespace curved3b {

namespace {

constexpr std::array<std::pair<TerminationReason, std::string_view>, 6> kReasonNames{{
    {TerminationReason::Completed, "COMPLETED"},
    {TerminationReason::CollisionApproach, "COLLISION_APPROACH"},
    {TerminationReason::StepBudget, "STEP_BUDGET"},
    {TerminationReason::BoundaryApproach, "BOUNDARY_APPROACH"},
    {TerminationReason::Escaped, "ESCAPED"},
    {TerminationReason::Initial, "INITIAL"},
}};

}  // namespace

std::string_view to_string(TerminationReason reason) {
  for (const auto& [r, name] : kReasonNames) {
    if (r == reason) return name;
  }
  return "UNKNOWN";
}

TerminationReason termination_reason_from_string(std::string_view name) {
  for (const auto& [r, n] : kReasonNames) {
    if (n == name) return r;
  }
  throw DomainError(fmt::format("unknown termination reason '{}'", name));
}

void StepControl::validate() const {
  if (!(initial_step > 0.0) || !(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0) ||
      max_steps <= 0 || !(singularity_guard > 0.0) || !(max_step > 0.0)) {
    throw DomainError("step control fields must all be positive");
  }
}

}  // namespace curved3b
