#include "curved3b/homographic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "curved3b/errors.hpp"

namespace curved3b {

namespace {

// |1 - kappa r^2| at or below this is treated as the equator r = kappa^{-1/2}.
constexpr double kBoundaryTolerance = 1e-14;

constexpr double kTwoPiOverThree = 2.0 * std::numbers::pi / 3.0;

void require_mass(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError(fmt::format("mass must be positive, got {}", m));
}

void require_size(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError(fmt::format("size must be positive, got {}", r));
}

// 1 - kappa r^2, rejecting sizes beyond the equator.
double equator_gap(double r, const Curvature& curv) {
  require_size(r);
  const double q = 1.0 - curv.kappa() * r * r;
  if (q < -kBoundaryTolerance) {
    throw DomainError(fmt::format("size {} lies beyond the equator r = {}", r, curv.radius()));
  }
  return std::abs(q) <= kBoundaryTolerance ? 0.0 : q;
}

// Common height z of the moving bodies, z^2 = (1 - kappa r^2) / |kappa|.
double height(double q, const Curvature& curv) { return std::sqrt(q / std::abs(curv.kappa())); }

struct HeightRates {
  double z = 0.0;
  double z_dot = 0.0;
  double z_ddot = 0.0;
};

HeightRates height_rates(double r, double r_dot, double r_ddot, const Curvature& curv) {
  const double q = equator_gap(r, curv);
  HeightRates h;
  h.z = height(q, curv);
  if (h.z == 0.0) {
    if (r_dot != 0.0 || r_ddot != 0.0) {
      throw DomainError("the ansatz is singular on the equator unless the size is stationary");
    }
    return h;
  }
  const double sigma = curv.sigma();
  h.z_dot = -sigma * r * r_dot / h.z;
  h.z_ddot = (-sigma * (r_dot * r_dot + r * r_ddot) - h.z_dot * h.z_dot) / h.z;
  return h;
}

SpaceVector planar_acceleration(double r, double r_dot, double r_ddot, double w, double w_dot, double angle,
                                double z_ddot) {
  const double radial = r_ddot - r * w * w;
  const double tangential = r * w_dot + 2.0 * r_dot * w;
  return {radial * std::cos(angle) - tangential * std::sin(angle),
          radial * std::sin(angle) + tangential * std::cos(angle), z_ddot};
}

double lagrangian_attraction(double r, double q, const Curvature& curv, double m) {
  const double s = 12.0 - 9.0 * curv.kappa() * r * r;
  if (!(s > 0.0)) throw SingularConfiguration("12 - 9 kappa r^2 must stay positive");
  return 24.0 * m * q / (r * r * s * std::sqrt(s));
}

double eulerian_attraction(double r, double q, const Curvature& curv, double m) {
  if (!(q > 0.0)) {
    throw SingularConfiguration("the Eulerian field is singular on the equator");
  }
  return m * (5.0 - 4.0 * curv.kappa() * r * r) / (4.0 * r * r * std::sqrt(q));
}

// kappa r nu^2 / (1 - kappa r^2), defined as 0 at the equator when nu = 0.
double height_coupling(double r, double nu, double q, const Curvature& curv) {
  if (q == 0.0) {
    if (nu != 0.0) throw DomainError("the reduced field is unbounded on the equator for nu != 0");
    return 0.0;
  }
  return curv.kappa() * r * nu * nu / q;
}

double attraction(ReducedKind kind, double r, double q, const Curvature& curv, double m) {
  return kind == ReducedKind::Lagrangian ? lagrangian_attraction(r, q, curv, m)
                                         : eulerian_attraction(r, q, curv, m);
}

// Smallest pair gap sigma(1 - (kappa q_i . q_j)^2) of the embedded configuration.
double reduced_min_gap(ReducedKind kind, double r, const Curvature& curv) {
  const double k = curv.kappa();
  const double sigma = curv.sigma();
  if (kind == ReducedKind::Lagrangian) {
    const double ij = 1.0 - 1.5 * k * r * r;
    return sigma * (1.0 - ij * ij);
  }
  const double q = std::max(0.0, 1.0 - k * r * r);
  const double g12 = sigma * (1.0 - q);
  const double ij = 1.0 - 2.0 * k * r * r;
  return std::min(g12, sigma * (1.0 - ij * ij));
}

}  // namespace

std::string_view to_string(ReducedKind kind) {
  return kind == ReducedKind::Lagrangian ? "lagrangian" : "eulerian";
}

ReducedKind reduced_kind_from_string(std::string_view name) {
  if (name == "lagrangian") return ReducedKind::Lagrangian;
  if (name == "eulerian") return ReducedKind::Eulerian;
  throw DomainError(fmt::format("unknown reduced kind '{}'", name));
}

SystemState embed_lagrangian(const ReducedState& rs, const Curvature& curv, double m) {
  require_mass(m);
  const double w = rs.angular_velocity();
  const HeightRates h = height_rates(rs.r, rs.nu, 0.0, curv);
  SystemState s;
  s.curv = curv;
  for (std::size_t i = 0; i < kBodyCount; ++i) {
    const double angle = rs.omega + kTwoPiOverThree * static_cast<double>(i);
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    s.bodies[i] = Body{m,
                       {rs.r * ca, rs.r * sa, h.z},
                       {rs.nu * ca - rs.r * w * sa, rs.nu * sa + rs.r * w * ca, h.z_dot}};
  }
  return s;
}

SystemState embed_eulerian(const ReducedState& rs, const Curvature& curv, double m) {
  require_mass(m);
  const double w = rs.angular_velocity();
  const HeightRates h = height_rates(rs.r, rs.nu, 0.0, curv);
  const double ca = std::cos(rs.omega);
  const double sa = std::sin(rs.omega);
  const SpaceVector planar{rs.r * ca, rs.r * sa, 0.0};
  const SpaceVector planar_v{rs.nu * ca - rs.r * w * sa, rs.nu * sa + rs.r * w * ca, 0.0};
  SystemState s;
  s.curv = curv;
  s.bodies[0] = Body{m, {0.0, 0.0, curv.radius()}, {}};
  s.bodies[1] = Body{m, {planar.x, planar.y, h.z}, {planar_v.x, planar_v.y, h.z_dot}};
  s.bodies[2] = Body{m, {-planar.x, -planar.y, h.z}, {-planar_v.x, -planar_v.y, h.z_dot}};
  return s;
}

SystemState embed_hyperbolic(const HyperbolicState& hs, const Curvature& curv, double m) {
  require_mass(m);
  if (curv.positive()) throw DomainError("hyperbolic Eulerian orbits need negative curvature");
  const double bound = curv.radius();
  if (!(hs.rho >= bound) || !std::isfinite(hs.rho)) {
    throw DomainError(fmt::format("rho = {} is below |kappa|^(-1/2) = {}", hs.rho, bound));
  }
  const double x2 = std::max(0.0, hs.rho * hs.rho + 1.0 / curv.kappa());
  const double x = std::sqrt(x2);
  double x_dot = 0.0;
  if (x == 0.0) {
    if (hs.rho_dot != 0.0) throw DomainError("rho_dot must vanish at rho = |kappa|^(-1/2)");
  } else {
    x_dot = hs.rho * hs.rho_dot / x;
  }
  const double sh = std::sinh(hs.omega);
  const double ch = std::cosh(hs.omega);
  const double w = hs.omega_dot;
  SystemState s;
  s.curv = curv;
  s.bodies[0] = Body{m, {0.0, bound * sh, bound * ch}, {0.0, bound * w * ch, bound * w * sh}};
  const SpaceVector v{x_dot, hs.rho_dot * sh + hs.rho * w * ch, hs.rho_dot * ch + hs.rho * w * sh};
  s.bodies[1] = Body{m, {x, hs.rho * sh, hs.rho * ch}, v};
  s.bodies[2] = Body{m, {-x, hs.rho * sh, hs.rho * ch}, {-v.x, v.y, v.z}};
  return s;
}

SystemState embed(ReducedKind kind, const ReducedState& rs, const Curvature& curv, double m) {
  return kind == ReducedKind::Lagrangian ? embed_lagrangian(rs, curv, m) : embed_eulerian(rs, curv, m);
}

std::array<SpaceVector, kBodyCount> lagrangian_ansatz_accelerations(const ReducedState& rs, double r_ddot,
                                                                     double omega_ddot, const Curvature& curv) {
  const HeightRates h = height_rates(rs.r, rs.nu, r_ddot, curv);
  const double w = rs.angular_velocity();
  std::array<SpaceVector, kBodyCount> acc{};
  for (std::size_t i = 0; i < kBodyCount; ++i) {
    const double angle = rs.omega + kTwoPiOverThree * static_cast<double>(i);
    acc[i] = planar_acceleration(rs.r, rs.nu, r_ddot, w, omega_ddot, angle, h.z_ddot);
  }
  return acc;
}

std::array<SpaceVector, kBodyCount> eulerian_ansatz_accelerations(const ReducedState& rs, double r_ddot,
                                                                   double omega_ddot, const Curvature& curv) {
  const HeightRates h = height_rates(rs.r, rs.nu, r_ddot, curv);
  const double w = rs.angular_velocity();
  const SpaceVector a = planar_acceleration(rs.r, rs.nu, r_ddot, w, omega_ddot, rs.omega, h.z_ddot);
  return {SpaceVector{}, a, SpaceVector{-a.x, -a.y, a.z}};
}

std::array<SpaceVector, kBodyCount> hyperbolic_ansatz_accelerations(const HyperbolicState& hs, double rho_ddot,
                                                                     double omega_ddot, const Curvature& curv) {
  if (curv.positive()) throw DomainError("hyperbolic Eulerian orbits need negative curvature");
  const double bound = curv.radius();
  const double x = std::sqrt(std::max(0.0, hs.rho * hs.rho + 1.0 / curv.kappa()));
  if (x == 0.0) throw DomainError("the hyperbolic ansatz is singular at rho = |kappa|^(-1/2)");
  const double x_dot = hs.rho * hs.rho_dot / x;
  const double x_ddot = (hs.rho_dot * hs.rho_dot + hs.rho * rho_ddot - x_dot * x_dot) / x;
  const double sh = std::sinh(hs.omega);
  const double ch = std::cosh(hs.omega);
  const double w = hs.omega_dot;
  const double radial = rho_ddot + hs.rho * w * w;
  const double tangential = hs.rho * omega_ddot + 2.0 * hs.rho_dot * w;
  const SpaceVector a0{0.0, bound * (omega_ddot * ch + w * w * sh), bound * (omega_ddot * sh + w * w * ch)};
  const SpaceVector a1{x_ddot, radial * sh + tangential * ch, radial * ch + tangential * sh};
  return {a0, a1, SpaceVector{-a1.x, a1.y, a1.z}};
}

double lagrangian_size(const SystemState& state) { return std::hypot(state.bodies[0].q.x, state.bodies[0].q.y); }

double eulerian_size(const SystemState& state) { return std::hypot(state.bodies[1].q.x, state.bodies[1].q.y); }

double hyperbolic_size(const SystemState& state) {
  const SpaceVector& q = state.bodies[1].q;
  return std::sqrt(std::max(0.0, q.z * q.z - q.y * q.y));
}

double reduced_size(ReducedKind kind, const SystemState& state) {
  return kind == ReducedKind::Lagrangian ? lagrangian_size(state) : eulerian_size(state);
}

ReducedRates lagrangian_rhs(double r, double nu, double c, const Curvature& curv, double m) {
  return reduced_rhs(ReducedKind::Lagrangian, r, nu, c, curv, m);
}

ReducedRates eulerian_rhs(double r, double nu, double c, const Curvature& curv, double m) {
  return reduced_rhs(ReducedKind::Eulerian, r, nu, c, curv, m);
}

ReducedRates reduced_rhs(ReducedKind kind, double r, double nu, double c, const Curvature& curv, double m) {
  const double q = equator_gap(r, curv);
  const double pull = attraction(kind, r, q, curv, m);
  const double coupling = height_coupling(r, nu, q, curv);
  return {nu, c * c * q / (r * r * r) - coupling - pull};
}

RotatingRates rotating_rhs(ReducedKind kind, double r, double w, double nu, const Curvature& curv, double m) {
  const double q = equator_gap(r, curv);
  const double pull = attraction(kind, r, q, curv, m);
  const double coupling = height_coupling(r, nu, q, curv);
  return {nu, -2.0 * nu * w / r, r * q * w * w - coupling - pull};
}

double ReducedSeries::size_at(double t) const {
  if (samples.empty()) throw DomainError("empty series");
  if (t <= samples.front().t) return samples.front().r;
  if (t >= samples.back().t) return samples.back().r;
  auto it = std::upper_bound(samples.begin(), samples.end(), t,
                             [](double value, const ReducedSample& s) { return value < s.t; });
  const ReducedSample& b = *it;
  const ReducedSample& a = *(it - 1);
  const double h = b.t - a.t;
  const double s = (t - a.t) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * a.r + h10 * h * a.nu + h01 * b.r + h11 * h * b.nu;
}

ReducedSeries integrate_reduced(ReducedKind kind, const ReducedState& rs, const Curvature& curv, double m,
                                double t_end, const StepControl& ctrl, double escape_radius) {
  ctrl.validate();
  require_mass(m);
  if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
  if (!std::isfinite(rs.nu) || !std::isfinite(rs.omega) || !std::isfinite(rs.c)) {
    throw DomainError("reduced state must be finite");
  }
  const ReducedRates start = reduced_rhs(kind, rs.r, rs.nu, rs.c, curv, m);

  ReducedSeries series;
  series.kind = kind;
  series.curv = curv;
  series.c = rs.c;
  series.m = m;
  series.samples.push_back({0.0, rs.r, rs.nu, rs.omega, start.nu_dot});

  using State = ode::State<3>;
  auto rhs = [&](double, const State& y) {
    const ReducedRates rates = reduced_rhs(kind, y[0], y[1], rs.c, curv, m);
    return State{rates.r_dot, rates.nu_dot, rs.c / (y[0] * y[0])};
  };
  TerminationReason halted = TerminationReason::Completed;
  auto on_accept = [&](double t, const State& y, const State& dy) {
    series.samples.push_back({t, y[0], y[1], y[2], dy[1]});
    const bool stationary = y[1] == 0.0 && dy[1] == 0.0;
    if (reduced_min_gap(kind, y[0], curv) <= ctrl.singularity_guard) {
      halted = TerminationReason::BoundaryApproach;
      return false;
    }
    if (curv.positive() && !stationary && 1.0 - curv.kappa() * y[0] * y[0] <= ctrl.singularity_guard) {
      halted = TerminationReason::BoundaryApproach;
      return false;
    }
    if (y[0] > escape_radius && y[1] > 0.0) {
      halted = TerminationReason::Escaped;
      return false;
    }
    return true;
  };

  State y{rs.r, rs.nu, rs.omega};
  double t = 0.0;
  switch (ode::integrate<3>(y, t, t_end, ctrl, rhs, [](State&) {}, on_accept)) {
    case ode::Outcome::Completed:
      series.reason = TerminationReason::Completed;
      break;
    case ode::Outcome::Halted:
      series.reason = halted;
      break;
    case ode::Outcome::StageFailure:
      series.reason = TerminationReason::BoundaryApproach;
      break;
    case ode::Outcome::StepBudget:
      series.reason = TerminationReason::StepBudget;
      break;
  }
  return series;
}

ReducedSeries integrate_reduced_both_ways(ReducedKind kind, const ReducedState& rs, const Curvature& curv,
                                          double m, double t_span, const StepControl& ctrl,
                                          double escape_radius) {
  ReducedSeries forward = integrate_reduced(kind, rs, curv, m, t_span, ctrl, escape_radius);
  ReducedState mirrored = rs;
  mirrored.nu = -rs.nu;
  const ReducedSeries backward = integrate_reduced(kind, mirrored, curv, m, t_span, ctrl, escape_radius);

  ReducedSeries merged = forward;
  merged.samples.clear();
  merged.samples.reserve(forward.samples.size() + backward.samples.size());
  for (auto it = backward.samples.rbegin(); it != backward.samples.rend(); ++it) {
    if (it->t == 0.0) continue;
    merged.samples.push_back({-it->t, it->r, -it->nu, 2.0 * rs.omega - it->omega, it->nu_dot});
  }
  merged.samples.insert(merged.samples.end(), forward.samples.begin(), forward.samples.end());
  merged.start_reason = backward.reason;
  return merged;
}

ResidualPair lagrangian_residuals(double r, double r_dot, double r_ddot, double w, double w_dot,
                                  const Curvature& curv, double m) {
  require_mass(m);
  const double q = equator_gap(r, curv);
  return {r_ddot - r * q * w * w + height_coupling(r, r_dot, q, curv) + lagrangian_attraction(r, q, curv, m),
          r * w_dot + 2.0 * r_dot * w};
}

ResidualPair eulerian_residuals(double r, double r_dot, double r_ddot, double w, double w_dot,
                                const Curvature& curv, double m) {
  require_mass(m);
  const double q = equator_gap(r, curv);
  return {r_ddot - r * q * w * w + height_coupling(r, r_dot, q, curv) + eulerian_attraction(r, q, curv, m),
          r * w_dot + 2.0 * r_dot * w};
}

std::array<double, 6> unequal_mass_residuals(double r, double r_dot, double r_ddot, double w, double w_dot,
                                             const Curvature& curv, double m1, double m2, double m3) {
  require_mass(m1);
  require_mass(m2);
  require_mass(m3);
  const double q = equator_gap(r, curv);
  const double s = 12.0 - 9.0 * curv.kappa() * r * r;
  if (!(s > 0.0)) throw SingularConfiguration("12 - 9 kappa r^2 must stay positive");
  const double denom = r * r * s * std::sqrt(s);
  const double radial = r_ddot - r * q * w * w + height_coupling(r, r_dot, q, curv);
  const double angular = r * w_dot + 2.0 * r_dot * w;
  const double pair = 12.0 * q / denom;
  const double twist = 4.0 * std::sqrt(3.0) / denom;
  return {radial + pair * (m1 + m2), radial + pair * (m2 + m3), radial + pair * (m3 + m1),
          angular - twist * (m1 - m2), angular - twist * (m2 - m3), angular - twist * (m3 - m1)};
}

ResidualPair hyperbolic_residuals(double rho, double rho_dot, double rho_ddot, double w, double w_dot,
                                  const Curvature& curv, double m) {
  require_mass(m);
  if (curv.positive()) throw DomainError("hyperbolic residuals need negative curvature");
  if (!(rho > curv.radius()) || !std::isfinite(rho)) {
    throw DomainError(fmt::format("rho = {} must exceed |kappa|^(-1/2) = {}", rho, curv.radius()));
  }
  const double k = curv.kappa();
  const double p = 1.0 + k * rho * rho;
  const double e = rho_ddot + rho * p * w * w - k * rho * rho_dot * rho_dot / p +
                   m * (1.0 - 4.0 * k * rho * rho) / (4.0 * rho * rho * std::sqrt(std::abs(p)));
  return {e, rho * w_dot + 2.0 * rho_dot * w};
}

double hyperbolic_re_rate(double rho, const Curvature& curv, double m) {
  require_mass(m);
  if (curv.positive()) throw DomainError("hyperbolic relative equilibria need negative curvature");
  if (!(rho > curv.radius()) || !std::isfinite(rho)) {
    throw DomainError(fmt::format("rho = {} must exceed |kappa|^(-1/2) = {}", rho, curv.radius()));
  }
  const double k = curv.kappa();
  const double p = std::abs(1.0 + k * rho * rho);
  return std::sqrt(m * (1.0 - 4.0 * k * rho * rho) / (4.0 * rho * rho * rho * p * std::sqrt(p)));
}

}  // namespace curved3b
