#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "curved3b/geometry.hpp"
#include "curved3b/ode.hpp"

namespace curved3b {

struct Body {
  double mass = 1.0;
  SpaceVector q;  ///< position
  SpaceVector v;  ///< velocity; momentum is mass * v
};

inline constexpr std::size_t kBodyCount = 3;

struct SystemState {
  double t = 0.0;
  Curvature curv{1.0};
  std::array<Body, kBodyCount> bodies{};

  /// Throws DomainError when a mass is not positive or a body is off the
  /// manifold or its tangent plane (beyond kManifoldTolerance, scaled by |v|).
  void validate() const;
};

/// Energy constant h and angular-momentum vector c = (alpha, beta, gamma).
struct ConservedLedger {
  double energy = 0.0;
  SpaceVector angular_momentum;
};

struct TrajectorySample {
  SystemState state;
  ConservedLedger ledger;
};

struct TrajectorySeries {
  std::vector<TrajectorySample> samples;
  TerminationReason reason = TerminationReason::Completed;
};

/// sigma - sigma (kappa q_i . q_j)^2 for the pair (i, j); vanishes at
/// collisions and, for the sphere, at antipodal configurations.
double pair_gap(const SystemState& state, std::size_t i, std::size_t j);

/// Smallest pair_gap over the three pairs.
double min_pair_gap(const SystemState& state);

/// The force function U (minus the potential energy).
double force_function(const SystemState& state, double singularity_guard = 1e-8);

/// Signed gradient (d/dx, d/dy, sigma d/dz) of U with respect to body i.
SpaceVector force_gradient(const SystemState& state, std::size_t i, double singularity_guard = 1e-8);

/// Second derivatives of the three positions under the constrained equations
/// of motion written in velocity form.
std::array<SpaceVector, kBodyCount> accelerations(const SystemState& state,
                                                  double singularity_guard = 1e-8);

double kinetic_energy(const SystemState& state);
double energy(const SystemState& state, double singularity_guard = 1e-8);
SpaceVector angular_momentum(const SystemState& state);
ConservedLedger ledger(const SystemState& state, double singularity_guard = 1e-8);

/// Adaptive integration with post-step projection onto the manifold.
/// Records every accepted step. Stops at t_end, on collision approach, when
/// the step budget is exhausted, or as Escaped once a coordinate passes
/// 1e6 max(1, R), beyond which doubles no longer hold the constraint.
TrajectorySeries integrate(const SystemState& state, double t_end, const StepControl& ctrl = {});

/// Largest manifold and tangency residuals over the bodies of a state.
struct ConstraintResiduals {
  double manifold = 0.0;
  double tangency = 0.0;
};
ConstraintResiduals constraint_residuals(const SystemState& state);

/// Drift of the conserved quantities relative to the first sample:
/// |h(t) - h(0)| / max(1, |h(0)|) and the largest component drift of c.
struct ConservationDrift {
  double energy = 0.0;
  double angular_momentum = 0.0;
};
ConservationDrift conservation_drift(const TrajectorySeries& series);

/// Returns the state with every velocity negated.
SystemState reversed(const SystemState& state);

}  // namespace curved3b
