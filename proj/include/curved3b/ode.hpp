#pragma once

// Adaptive Dormand-Prince 5(4) driver shared by the full and reduced
// integrators.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <string_view>
#include <utility>

#include "curved3b/errors.hpp"

namespace curved3b {

/// Why an integration stopped.
enum class TerminationReason {
  Completed,          ///< reached t_end
  CollisionApproach,  ///< a pair came within the singularity guard
  StepBudget,         ///< max_steps accepted steps taken
  BoundaryApproach,   ///< reduced size reached r = 0 or the equator
  Escaped,            ///< reduced size passed the escape radius while growing
  Initial,            ///< marks the start end of a series that was not integrated backward
};

std::string_view to_string(TerminationReason reason);
TerminationReason termination_reason_from_string(std::string_view name);

struct StepControl {
  double initial_step = 1e-3;
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 1e-12;
  long max_steps = 2'000'000;
  /// Lower bound on the pair quantity sigma - sigma (kappa q_i . q_j)^2 and on
  /// the reduced distance to r = 0 and to the equator.
  double singularity_guard = 1e-8;
  double max_step = std::numeric_limits<double>::infinity();

  /// Throws DomainError unless every field is positive.
  void validate() const;
};

/// Hard floor on the step size.
inline constexpr double kMinimumStep = 1e-14;

namespace ode {

template <std::size_t N>
using State = std::array<double, N>;

enum class Outcome { Completed, Halted, StageFailure, StepBudget };

namespace detail {

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
  State<N> out = y;
  for (const auto& [coef, k] : terms) {
    if (coef == 0.0) continue;
    for (std::size_t i = 0; i < N; ++i) out[i] += h * coef * (*k)[i];
  }
  return out;
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from t to t_end.
///
/// `rhs` may throw SingularConfiguration or DomainError for trial states; the
/// step is then cut by four and retried, and Outcome::StageFailure is returned
/// once the step falls below kMinimumStep. `project` is applied to every
/// accepted state. `on_accept(t, y, dydt)` sees each accepted state with its
/// derivative and returns false to halt. Error-controlled step rejection below
/// kMinimumStep throws StepUnderflow.
template <std::size_t N, class Rhs, class Project, class OnAccept>
Outcome integrate(State<N>& y, double& t, double t_end, const StepControl& ctrl, Rhs&& rhs,
                  Project&& project, OnAccept&& on_accept) {
  // Dormand & Prince (1980) tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  using detail::axpy;

  State<N> k1;
  try {
    k1 = rhs(t, y);
  } catch (const SingularConfiguration&) {
    return Outcome::StageFailure;
  } catch (const DomainError&) {
    return Outcome::StageFailure;
  }

  double h = std::min({ctrl.initial_step, ctrl.max_step, t_end - t});
  long steps = 0;
  while (t < t_end) {
    if (steps >= ctrl.max_steps) return Outcome::StepBudget;
    bool last = false;
    if (t + h >= t_end) {
      h = t_end - t;
      last = true;
    }

    State<N> k2, k3, k4, k5, k6, k7, y5;
    try {
      k2 = rhs(t + c2 * h, axpy<N>(y, h, {{a21, &k1}}));
      k3 = rhs(t + c3 * h, axpy<N>(y, h, {{a31, &k1}, {a32, &k2}}));
      k4 = rhs(t + c4 * h, axpy<N>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      k5 = rhs(t + c5 * h, axpy<N>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      k6 = rhs(t + h, axpy<N>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      y5 = axpy<N>(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      k7 = rhs(t + h, y5);
    } catch (const SingularConfiguration&) {
      h *= 0.25;
      if (h < kMinimumStep) return Outcome::StageFailure;
      continue;
    } catch (const DomainError&) {
      h *= 0.25;
      if (h < kMinimumStep) return Outcome::StageFailure;
      continue;
    }

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = ctrl.absolute_tolerance +
                           ctrl.relative_tolerance * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    if (!std::isfinite(err)) {
      h *= 0.25;
      if (h < kMinimumStep) return Outcome::StageFailure;
      continue;
    }

    if (err <= 1.0) {
      t = last ? t_end : t + h;
      y = y5;
      project(y);
      try {
        k1 = rhs(t, y);
      } catch (const SingularConfiguration&) {
        return Outcome::StageFailure;
      } catch (const DomainError&) {
        return Outcome::StageFailure;
      }
      ++steps;
      if (!on_accept(t, static_cast<const State<N>&>(y), static_cast<const State<N>&>(k1))) {
        return Outcome::Halted;
      }
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::min(h * factor, ctrl.max_step);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < kMinimumStep) {
        throw StepUnderflow("step size fell below 1e-14 under error control");
      }
    }
  }
  return Outcome::Completed;
}

}  // namespace ode
}  // namespace curved3b
