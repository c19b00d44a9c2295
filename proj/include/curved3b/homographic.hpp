#pragma once

#include <array>
#include <limits>
#include <string_view>
#include <vector>

#include "curved3b/dynamics.hpp"
#include "curved3b/geometry.hpp"
#include "curved3b/ode.hpp"

namespace curved3b {

/// Which homographic ansatz a reduced (r, nu) system describes.
enum class ReducedKind { Lagrangian, Eulerian };

std::string_view to_string(ReducedKind kind);
ReducedKind reduced_kind_from_string(std::string_view name);

/// Size r, size rate nu, angle omega and angular-momentum constant c of a
/// Lagrangian or Eulerian orbit; the angular velocity is w = c / r^2.
struct ReducedState {
  double r = 1.0;
  double nu = 0.0;
  double omega = 0.0;
  double c = 0.0;

  double angular_velocity() const { return c / (r * r); }
};

/// Size rho and hyperbolic angle omega of a hyperbolic Eulerian orbit, with
/// their rates.
struct HyperbolicState {
  double rho = 1.0;
  double rho_dot = 0.0;
  double omega = 0.0;
  double omega_dot = 0.0;
};

struct ReducedRates {
  double r_dot = 0.0;
  double nu_dot = 0.0;
};

// --- embeddings into the full problem (equal masses m) ---------------------

SystemState embed_lagrangian(const ReducedState& rs, const Curvature& curv, double m);
SystemState embed_eulerian(const ReducedState& rs, const Curvature& curv, double m);
SystemState embed_hyperbolic(const HyperbolicState& hs, const Curvature& curv, double m);
SystemState embed(ReducedKind kind, const ReducedState& rs, const Curvature& curv, double m);

/// Second derivatives the ansatz prescribes for given (r_ddot, omega_ddot).
std::array<SpaceVector, kBodyCount> lagrangian_ansatz_accelerations(const ReducedState& rs, double r_ddot,
                                                                     double omega_ddot, const Curvature& curv);
std::array<SpaceVector, kBodyCount> eulerian_ansatz_accelerations(const ReducedState& rs, double r_ddot,
                                                                   double omega_ddot, const Curvature& curv);
std::array<SpaceVector, kBodyCount> hyperbolic_ansatz_accelerations(const HyperbolicState& hs, double rho_ddot,
                                                                     double omega_ddot, const Curvature& curv);

/// Size recovered from a full state built by the corresponding embedding.
double lagrangian_size(const SystemState& state);
double eulerian_size(const SystemState& state);
double hyperbolic_size(const SystemState& state);
double reduced_size(ReducedKind kind, const SystemState& state);

// --- reduced vector fields ---------------------------------------------------

ReducedRates lagrangian_rhs(double r, double nu, double c, const Curvature& curv, double m);
ReducedRates eulerian_rhs(double r, double nu, double c, const Curvature& curv, double m);
ReducedRates reduced_rhs(ReducedKind kind, double r, double nu, double c, const Curvature& curv, double m);

/// Rates of the system before w = c / r^2 is substituted: (r, w, nu) with
/// w' = -2 nu w / r.
struct RotatingRates {
  double r_dot = 0.0;
  double w_dot = 0.0;
  double nu_dot = 0.0;
};
RotatingRates rotating_rhs(ReducedKind kind, double r, double w, double nu, const Curvature& curv, double m);

// --- reduced integration -----------------------------------------------------

struct ReducedSample {
  double t = 0.0;
  double r = 0.0;
  double nu = 0.0;
  double omega = 0.0;
  double nu_dot = 0.0;  ///< field value at the sample; used for Hermite interpolation
};

struct ReducedSeries {
  ReducedKind kind = ReducedKind::Lagrangian;
  Curvature curv{1.0};
  double c = 0.0;
  double m = 1.0;
  std::vector<ReducedSample> samples;
  TerminationReason reason = TerminationReason::Completed;
  /// How the earliest sample was reached: Initial for a forward-only run,
  /// otherwise the termination reason of the backward leg.
  TerminationReason start_reason = TerminationReason::Initial;

  /// Size at time t by cubic Hermite interpolation between samples.
  double size_at(double t) const;
};

/// Adaptive integration of (r, nu, omega). Halts with BoundaryApproach when r
/// or (for kappa > 0) 1 - kappa r^2 falls to the singularity guard, and with
/// Escaped once r exceeds escape_radius while growing.
ReducedSeries integrate_reduced(ReducedKind kind, const ReducedState& rs, const Curvature& curv, double m,
                                double t_end, const StepControl& ctrl = {},
                                double escape_radius = std::numeric_limits<double>::infinity());

/// Forward and backward integration over [-t_span, t_span] merged into one
/// series. The backward leg uses the reflection (r, nu) -> (r, -nu).
ReducedSeries integrate_reduced_both_ways(ReducedKind kind, const ReducedState& rs, const Curvature& curv,
                                          double m, double t_span, const StepControl& ctrl = {},
                                          double escape_radius = std::numeric_limits<double>::infinity());

// --- residual systems --------------------------------------------------------

struct ResidualPair {
  double first = 0.0;   ///< A, C or E
  double second = 0.0;  ///< B, D or F
};

ResidualPair lagrangian_residuals(double r, double r_dot, double r_ddot, double w, double w_dot,
                                  const Curvature& curv, double m);
ResidualPair eulerian_residuals(double r, double r_dot, double r_ddot, double w, double w_dot,
                                const Curvature& curv, double m);

/// The six left-hand sides for a Lagrangian ansatz with masses m1, m2, m3:
/// three radial equations with pair sums, then three angular equations with
/// the differences m1-m2, m2-m3, m3-m1.
std::array<double, 6> unequal_mass_residuals(double r, double r_dot, double r_ddot, double w, double w_dot,
                                             const Curvature& curv, double m1, double m2, double m3);

ResidualPair hyperbolic_residuals(double rho, double rho_dot, double rho_ddot, double w, double w_dot,
                                  const Curvature& curv, double m);

/// Angular rate a >= 0 of the hyperbolic Eulerian relative equilibrium of size
/// rho: a^2 = m (1 - 4 kappa rho^2) / (4 rho^3 |1 + kappa rho^2|^{3/2}).
double hyperbolic_re_rate(double rho, const Curvature& curv, double m);

}  // namespace curved3b
