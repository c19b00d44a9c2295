#include "curved3b/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "curved3b/errors.hpp"

namespace curved3b {

namespace {

constexpr std::size_t kStateSize = 6 * kBodyCount;
using PackedState = ode::State<kStateSize>;
constexpr double kEscapeScale = 1e6;

PackedState pack(const SystemState& s) {
  PackedState y{};
  for (std::size_t b = 0; b < kBodyCount; ++b) {
    const Body& body = s.bodies[b];
    y[6 * b + 0] = body.q.x;
    y[6 * b + 1] = body.q.y;
    y[6 * b + 2] = body.q.z;
    y[6 * b + 3] = body.v.x;
    y[6 * b + 4] = body.v.y;
    y[6 * b + 5] = body.v.z;
  }
  return y;
}

void unpack(const PackedState& y, SystemState& s) {
  for (std::size_t b = 0; b < kBodyCount; ++b) {
    Body& body = s.bodies[b];
    body.q = {y[6 * b + 0], y[6 * b + 1], y[6 * b + 2]};
    body.v = {y[6 * b + 3], y[6 * b + 4], y[6 * b + 5]};
  }
}

double norm(const SpaceVector& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

// sigma (kappa q_i.q_i)(kappa q_j.q_j) - sigma (kappa q_i.q_j)^2; equals
// pair_gap on the manifold and keeps U homogeneous off it.
double general_gap(const SpaceVector& qi, const SpaceVector& qj, const Curvature& curv) {
  const Signature s = curv.signature();
  const double k = curv.kappa();
  const double ii = k * signed_dot(qi, qi, s);
  const double jj = k * signed_dot(qj, qj, s);
  const double ij = k * signed_dot(qi, qj, s);
  return curv.sigma() * (ii * jj - ij * ij);
}

void check_gap(double gap, std::size_t i, std::size_t j, double guard) {
  if (!(gap > guard)) {
    throw SingularConfiguration(
        fmt::format("bodies {} and {} are singular (gap {:.3e} <= {:.1e})", i + 1, j + 1, gap, guard));
  }
}

}  // namespace

void SystemState::validate() const {
  for (std::size_t b = 0; b < kBodyCount; ++b) {
    const Body& body = bodies[b];
    if (!(body.mass > 0.0) || !std::isfinite(body.mass)) {
      throw DomainError(fmt::format("body {} has non-positive mass {}", b + 1, body.mass));
    }
    if (!body.q.finite() || !body.v.finite()) {
      throw DomainError(fmt::format("body {} has non-finite coordinates", b + 1));
    }
    if (std::abs(manifold_residual(body.q, curv)) > kManifoldTolerance) {
      throw DomainError(fmt::format("body {} is off the manifold (residual {:.3e})", b + 1,
                                    manifold_residual(body.q, curv)));
    }
    const double tangency = std::abs(signed_dot(body.q, body.v, curv.signature()));
    if (tangency > kManifoldTolerance * std::max(1.0, norm(body.q) * norm(body.v))) {
      throw DomainError(fmt::format("body {} velocity is not tangent (q.v = {:.3e})", b + 1, tangency));
    }
  }
  if (curv.kappa() < 0.0) {
    for (std::size_t b = 0; b < kBodyCount; ++b) {
      if (!(bodies[b].q.z > 0.0)) {
        throw DomainError(fmt::format("body {} is not on the upper sheet", b + 1));
      }
    }
  }
}

double pair_gap(const SystemState& state, std::size_t i, std::size_t j) {
  const double ij = state.curv.kappa() * signed_dot(state.bodies[i].q, state.bodies[j].q, state.curv.signature());
  return state.curv.sigma() * (1.0 - ij * ij);
}

double min_pair_gap(const SystemState& state) {
  return std::min({pair_gap(state, 0, 1), pair_gap(state, 0, 2), pair_gap(state, 1, 2)});
}

double force_function(const SystemState& state, double singularity_guard) {
  const Curvature& curv = state.curv;
  const double root_k = std::sqrt(std::abs(curv.kappa()));
  double u = 0.0;
  for (std::size_t i = 0; i < kBodyCount; ++i) {
    for (std::size_t j = i + 1; j < kBodyCount; ++j) {
      const SpaceVector& qi = state.bodies[i].q;
      const SpaceVector& qj = state.bodies[j].q;
      const double gap = general_gap(qi, qj, curv);
      check_gap(gap, i, j, singularity_guard);
      const double ij = curv.kappa() * signed_dot(qi, qj, curv.signature());
      u += state.bodies[i].mass * state.bodies[j].mass * root_k * ij / std::sqrt(gap);
    }
  }
  return u;
}

SpaceVector force_gradient(const SystemState& state, std::size_t i, double singularity_guard) {
  const Curvature& curv = state.curv;
  const Signature s = curv.signature();
  const double k = curv.kappa();
  const double k32 = std::pow(std::abs(k), 1.5);
  const SpaceVector& qi = state.bodies[i].q;
  SpaceVector grad;
  for (std::size_t j = 0; j < kBodyCount; ++j) {
    if (j == i) continue;
    const SpaceVector& qj = state.bodies[j].q;
    const double gap = general_gap(qi, qj, curv);
    check_gap(gap, std::min(i, j), std::max(i, j), singularity_guard);
    const double ii = k * signed_dot(qi, qi, s);
    const double jj = k * signed_dot(qj, qj, s);
    const double ij = k * signed_dot(qi, qj, s);
    const double coef = state.bodies[i].mass * state.bodies[j].mass * k32 * jj / std::pow(gap, 1.5);
    grad += coef * (ii * qj - ij * qi);
  }
  return grad;
}

std::array<SpaceVector, kBodyCount> accelerations(const SystemState& state, double singularity_guard) {
  const Curvature& curv = state.curv;
  const Signature s = curv.signature();
  const double k = curv.kappa();
  const double k32 = std::pow(std::abs(k), 1.5);
  std::array<SpaceVector, kBodyCount> acc{};
  for (std::size_t i = 0; i < kBodyCount; ++i) {
    const SpaceVector& qi = state.bodies[i].q;
    for (std::size_t j = i + 1; j < kBodyCount; ++j) {
      const SpaceVector& qj = state.bodies[j].q;
      const double ij = k * signed_dot(qi, qj, s);
      const double gap = curv.sigma() * (1.0 - ij * ij);
      check_gap(gap, i, j, singularity_guard);
      const double inv = k32 / (gap * std::sqrt(gap));
      acc[i] += (state.bodies[j].mass * inv) * (qj - ij * qi);
      acc[j] += (state.bodies[i].mass * inv) * (qi - ij * qj);
    }
    const SpaceVector& vi = state.bodies[i].v;
    acc[i] -= (k * signed_dot(vi, vi, s)) * qi;
  }
  return acc;
}

double kinetic_energy(const SystemState& state) {
  const Signature s = state.curv.signature();
  double t = 0.0;
  for (const Body& b : state.bodies) {
    t += 0.5 * b.mass * signed_dot(b.v, b.v, s) * (state.curv.kappa() * signed_dot(b.q, b.q, s));
  }
  return t;
}

double energy(const SystemState& state, double singularity_guard) {
  return kinetic_energy(state) - force_function(state, singularity_guard);
}

SpaceVector angular_momentum(const SystemState& state) {
  SpaceVector c;
  for (const Body& b : state.bodies) {
    c += signed_cross(b.q, b.mass * b.v, state.curv.signature());
  }
  return c;
}

ConservedLedger ledger(const SystemState& state, double singularity_guard) {
  return {energy(state, singularity_guard), angular_momentum(state)};
}

TrajectorySeries integrate(const SystemState& state, double t_end, const StepControl& ctrl) {
  ctrl.validate();
  state.validate();
  if (!(t_end > state.t)) {
    throw DomainError(fmt::format("t_end {} must exceed the start time {}", t_end, state.t));
  }

  TrajectorySeries series;
  series.samples.push_back({state, ledger(state, ctrl.singularity_guard)});

  SystemState work = state;
  auto rhs = [&](double, const PackedState& y) {
    unpack(y, work);
    const auto acc = accelerations(work, ctrl.singularity_guard);
    PackedState dy{};
    for (std::size_t b = 0; b < kBodyCount; ++b) {
      dy[6 * b + 0] = y[6 * b + 3];
      dy[6 * b + 1] = y[6 * b + 4];
      dy[6 * b + 2] = y[6 * b + 5];
      dy[6 * b + 3] = acc[b].x;
      dy[6 * b + 4] = acc[b].y;
      dy[6 * b + 5] = acc[b].z;
    }
    return dy;
  };
  bool escaped = false;
  bool collided = false;
  auto project = [&](PackedState& y) {
    if (escaped) return;
    for (std::size_t b = 0; b < kBodyCount; ++b) {
      SpaceVector q{y[6 * b + 0], y[6 * b + 1], y[6 * b + 2]};
      SpaceVector v{y[6 * b + 3], y[6 * b + 4], y[6 * b + 5]};
      try {
        q = project_position(q, state.curv);
        v = project_velocity(q, v, state.curv);
      } catch (const DegenerateVector&) {
        // Only reachable far out on the hyperboloid, where q.q = -1/|kappa|
        // is lost to cancellation.
        escaped = true;
        return;
      }
      y[6 * b + 0] = q.x;
      y[6 * b + 1] = q.y;
      y[6 * b + 2] = q.z;
      y[6 * b + 3] = v.x;
      y[6 * b + 4] = v.y;
      y[6 * b + 5] = v.z;
    }
  };
  SystemState sample = state;
  const double escape_extent = kEscapeScale * std::max(1.0, state.curv.radius());
  auto on_accept = [&](double t, const PackedState& y, const PackedState&) {
    if (escaped) return false;
    unpack(y, sample);
    sample.t = t;
    try {
      series.samples.push_back({sample, ledger(sample, ctrl.singularity_guard)});
    } catch (const SingularConfiguration&) {
      collided = true;
      return false;
    }
    for (std::size_t i = 0; i < kStateSize; i += 6) {
      if (std::max({std::abs(y[i]), std::abs(y[i + 1]), std::abs(y[i + 2])}) > escape_extent) escaped = true;
    }
    return !escaped;
  };

  PackedState y = pack(state);
  double t = state.t;
  switch (ode::integrate<kStateSize>(y, t, t_end, ctrl, rhs, project, on_accept)) {
    case ode::Outcome::Completed:
    case ode::Outcome::Halted:
      series.reason = collided  ? TerminationReason::CollisionApproach
                      : escaped ? TerminationReason::Escaped
                                : TerminationReason::Completed;
      break;
    case ode::Outcome::StageFailure:
      series.reason = TerminationReason::CollisionApproach;
      break;
    case ode::Outcome::StepBudget:
      series.reason = TerminationReason::StepBudget;
      break;
  }
  return series;
}

ConstraintResiduals constraint_residuals(const SystemState& state) {
  ConstraintResiduals r;
  for (const Body& b : state.bodies) {
    r.manifold = std::max(r.manifold, std::abs(manifold_residual(b.q, state.curv)));
    r.tangency = std::max(r.tangency, std::abs(signed_dot(b.q, b.v, state.curv.signature())));
  }
  return r;
}

ConservationDrift conservation_drift(const TrajectorySeries& series) {
  ConservationDrift d;
  if (series.samples.empty()) return d;
  const ConservedLedger& first = series.samples.front().ledger;
  const double e_scale = std::max(1.0, std::abs(first.energy));
  const double c_scale = std::max(1.0, norm(first.angular_momentum));
  for (const TrajectorySample& s : series.samples) {
    d.energy = std::max(d.energy, std::abs(s.ledger.energy - first.energy) / e_scale);
    const SpaceVector dc = s.ledger.angular_momentum - first.angular_momentum;
    d.angular_momentum =
        std::max({d.angular_momentum, std::abs(dc.x) / c_scale, std::abs(dc.y) / c_scale,
                  std::abs(dc.z) / c_scale});
  }
  return d;
}

SystemState reversed(const SystemState& state) {
  SystemState out = state;
  for (Body& b : out.bodies) b.v = -b.v;
  return out;
}

}  // namespace curved3b
