#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curved3b/dynamics.hpp"

namespace curved3b {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 1729;
  /// Overrides the per-check trial count when positive.
  int trials = 0;
};

/// Check names in acceptance order: fixed-points, resultant, counts,
/// conservation, reduced-vs-full, taxonomy, unequal-mass, hyperbolic, period.
const std::vector<std::string_view>& check_names();

/// Runs one named check. Throws DomainError for an unknown name.
CheckResult run_check(std::string_view name, const VerifyOptions& opts = {});

std::vector<CheckResult> run_all(const VerifyOptions& opts = {});

/// Random state with pair gaps above min_gap: masses uniform in mass_range,
/// positions spread over a cap of the sphere or a disc of the hyperboloid,
/// tangent velocities of speed up to max_speed.
SystemState random_system_state(std::mt19937_64& rng, const Curvature& curv, double min_gap = 0.05,
                                std::pair<double, double> mass_range = {0.5, 2.0}, double max_speed = 0.5);

}  // namespace curved3b
