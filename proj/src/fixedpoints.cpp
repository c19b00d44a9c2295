#include "curved3b/fixedpoints.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "curved3b/errors.hpp"

namespace curved3b {

namespace {

// |residual| of the field at a claimed fixed point, relative to its terms.
constexpr double kFixedPointTolerance = 1e-8;
// |g'| or |u'| below this, relative to its terms, counts as a double root.
constexpr double kDegenerateTolerance = 1e-6;
// Relative distance at which r is taken to be the equator itself.
constexpr double kEquatorTolerance = 1e-12;

void require_positive(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError(fmt::format("r must be positive, got {}", r));
}

double lagrangian_s(double r, const Curvature& curv) {
  require_positive(r);
  const double s = 12.0 - 9.0 * curv.kappa() * r * r;
  if (!(s > 0.0)) throw DomainError(fmt::format("12 - 9 kappa r^2 = {} must be positive", s));
  return s;
}

double eulerian_q(double r, const Curvature& curv) {
  require_positive(r);
  const double q = 1.0 - curv.kappa() * r * r;
  if (!(q > 0.0)) throw DomainError(fmt::format("1 - kappa r^2 = {} must be positive", q));
  return q;
}

// 1 - kappa r^2 for the Lagrangian field, which is defined on the equator.
double lagrangian_q(double r, const Curvature& curv) {
  lagrangian_s(r, curv);
  const double q = 1.0 - curv.kappa() * r * r;
  if (q < -kEquatorTolerance) throw DomainError(fmt::format("r = {} lies beyond the equator", r));
  return std::max(q, 0.0);
}

bool at_equator(double r, const Curvature& curv) {
  return curv.positive() && std::abs(r * std::sqrt(curv.kappa()) - 1.0) <= kEquatorTolerance;
}

FixedPointRecord from_partial(double r, double partial, bool degenerate) {
  FixedPointRecord rec;
  rec.r = r;
  rec.kind = FixedPointKind::Interior;
  if (degenerate) {
    rec.stability = Stability::Degenerate;
    rec.eigenvalues = {0.0, 0.0};
  } else if (partial < 0.0) {
    const double w = std::sqrt(-partial);
    rec.stability = Stability::Center;
    rec.eigenvalues = {std::complex<double>(0.0, w), std::complex<double>(0.0, -w)};
  } else {
    const double w = std::sqrt(partial);
    rec.stability = Stability::Saddle;
    rec.eigenvalues = {std::complex<double>(w, 0.0), std::complex<double>(-w, 0.0)};
  }
  return rec;
}

FixedPointRecord equator_record(const Curvature& curv) {
  FixedPointRecord rec;
  rec.r = curv.radius();
  rec.kind = FixedPointKind::EquatorBoundary;
  rec.stability = Stability::BoundaryNonhyperbolic;
  return rec;
}

std::vector<double> roots_in_r(const Polynomial& p, double x_upper) {
  std::vector<double> rs;
  for (double x : positive_roots(p, x_upper)) rs.push_back(std::sqrt(x));
  return rs;
}

}  // namespace

std::string_view to_string(FixedPointKind kind) {
  return kind == FixedPointKind::Interior ? "INTERIOR" : "EQUATOR_BOUNDARY";
}

std::string_view to_string(Stability stability) {
  switch (stability) {
    case Stability::Center:
      return "CENTER";
    case Stability::Saddle:
      return "SADDLE";
    case Stability::Degenerate:
      return "DEGENERATE";
    case Stability::BoundaryNonhyperbolic:
      return "BOUNDARY_NONHYPERBOLIC";
  }
  return "DEGENERATE";
}

FixedPointKind fixed_point_kind_from_string(std::string_view name) {
  if (name == "INTERIOR") return FixedPointKind::Interior;
  if (name == "EQUATOR_BOUNDARY") return FixedPointKind::EquatorBoundary;
  throw DomainError(fmt::format("unknown fixed point kind '{}'", name));
}

Stability stability_from_string(std::string_view name) {
  for (Stability s : {Stability::Center, Stability::Saddle, Stability::Degenerate, Stability::BoundaryNonhyperbolic}) {
    if (to_string(s) == name) return s;
  }
  throw DomainError(fmt::format("unknown stability '{}'", name));
}

double g_value(double r, const Curvature& curv, double c, double m) {
  const double s = lagrangian_s(r, curv);
  return c * c / r - 24.0 * m / (s * std::sqrt(s));
}

double dg_dr(double r, const Curvature& curv, double c, double m) {
  const double s = lagrangian_s(r, curv);
  return -c * c / (r * r) - 648.0 * m * curv.kappa() * r / (s * s * std::sqrt(s));
}

double d2g_dr2(double r, const Curvature& curv, double c, double m) {
  const double s = lagrangian_s(r, curv);
  const double k = curv.kappa();
  const double s52 = s * s * std::sqrt(s);
  return 2.0 * c * c / (r * r * r) - 648.0 * m * k / s52 - 29160.0 * m * k * k * r * r / (s52 * s);
}

double g1_value(double r, const Curvature& curv) {
  require_positive(r);
  return (1.0 - curv.kappa() * r * r) / (r * r);
}

double g2_value(double r, double nu, const Curvature& curv) {
  require_positive(r);
  const double q = 1.0 - curv.kappa() * r * r;
  if (nu == 0.0) return 0.0;
  if (!(q > 0.0)) throw DomainError("g2 is unbounded on the equator for nu != 0");
  return -curv.kappa() * r * nu * nu / q;
}

double dg2_dr(double r, double nu, const Curvature& curv) {
  require_positive(r);
  const double k = curv.kappa();
  const double q = 1.0 - k * r * r;
  if (nu == 0.0) return 0.0;
  if (!(q > 0.0)) throw DomainError("g2 is unbounded on the equator for nu != 0");
  return -k * nu * nu * (1.0 + k * r * r) / (q * q);
}

double G_value(double r, double nu, const Curvature& curv, double c, double m) {
  lagrangian_q(r, curv);
  return g1_value(r, curv) * g_value(r, curv, c, m) + g2_value(r, nu, curv);
}

double dG_dr(double r, double nu, const Curvature& curv, double c, double m) {
  lagrangian_q(r, curv);
  return -2.0 / (r * r * r) * g_value(r, curv, c, m) + g1_value(r, curv) * dg_dr(r, curv, c, m) +
         dg2_dr(r, nu, curv);
}

double u_value(double r, const Curvature& curv, double c, double m) {
  const double q = eulerian_q(r, curv);
  return c * c * q / r - m * (5.0 - 4.0 * curv.kappa() * r * r) / (4.0 * std::sqrt(q));
}

double du_dr(double r, const Curvature& curv, double c, double m) {
  const double q = eulerian_q(r, curv);
  const double k = curv.kappa();
  return -c * c * (1.0 + k * r * r) / (r * r) - k * m * r * (4.0 * k * r * r - 3.0) / (4.0 * q * std::sqrt(q));
}

double W_value(double r, double nu, const Curvature& curv, double c, double m) {
  return u_value(r, curv, c, m) / (r * r) + g2_value(r, nu, curv);
}

double dW_dr(double r, double nu, const Curvature& curv, double c, double m) {
  return -2.0 * u_value(r, curv, c, m) / (r * r * r) + du_dr(r, curv, c, m) / (r * r) + dg2_dr(r, nu, curv);
}

Polynomial lagrangian_polynomial(const Curvature& curv, double c, double m) {
  using Real = Polynomial::Real;
  const Real k = curv.kappa();
  const Real c4 = static_cast<Real>(c) * c * c * c;
  const Real m2 = static_cast<Real>(m) * m;
  return Polynomial({-1728.0L * c4, 144.0L * (27.0L * c4 * k + 4.0L * m2), -2916.0L * c4 * k * k,
                     729.0L * c4 * k * k * k});
}

Polynomial eulerian_polynomial(const Curvature& curv, double c, double m) {
  using Real = Polynomial::Real;
  const Real k = curv.kappa();
  const Real c4 = static_cast<Real>(c) * c * c * c;
  const Real m2 = static_cast<Real>(m) * m;
  return Polynomial({-16.0L * c4, 48.0L * c4 * k + 25.0L * m2, -8.0L * k * (6.0L * c4 * k + 5.0L * m2),
                     16.0L * k * k * (c4 * k + m2)});
}

std::vector<FixedPointRecord> lagrangian_fixed_points(const Curvature& curv, double c, double m) {
  const Polynomial p = lagrangian_polynomial(curv, c, m);
  const double x_upper = curv.positive() ? 1.0 / curv.kappa() : cauchy_bound(p);
  std::vector<FixedPointRecord> out;
  if (!p.is_zero() && p.degree() > 0) {
    for (double r : roots_in_r(p, x_upper)) out.push_back(classify(ReducedKind::Lagrangian, r, curv, c, m));
  }
  if (curv.positive()) out.push_back(equator_record(curv));
  return out;
}

std::vector<FixedPointRecord> eulerian_fixed_points(const Curvature& curv, double c, double m) {
  const Polynomial q = eulerian_polynomial(curv, c, m);
  std::vector<FixedPointRecord> out;
  if (q.is_zero() || q.degree() < 1) return out;
  const double x_upper = curv.positive() ? 1.0 / curv.kappa() : cauchy_bound(q);
  for (double r : roots_in_r(q, x_upper)) out.push_back(classify(ReducedKind::Eulerian, r, curv, c, m));
  return out;
}

std::vector<FixedPointRecord> fixed_points(ReducedKind kind, const Curvature& curv, double c, double m) {
  return kind == ReducedKind::Lagrangian ? lagrangian_fixed_points(curv, c, m) : eulerian_fixed_points(curv, c, m);
}

FixedPointRecord classify(ReducedKind kind, double r0, const Curvature& curv, double c, double m) {
  if (kind == ReducedKind::Lagrangian) {
    if (at_equator(r0, curv)) return equator_record(curv);
    const double s = lagrangian_s(r0, curv);
    const double scale = c * c / r0 + 24.0 * m / (s * std::sqrt(s));
    const double g = g_value(r0, curv, c, m);
    if (std::abs(g) > kFixedPointTolerance * scale) {
      throw NotAFixedPoint(fmt::format("g({}) = {:.3e} does not vanish", r0, g));
    }
    const double slope_scale = c * c / (r0 * r0) + std::abs(648.0 * m * curv.kappa() * r0 / (s * s * std::sqrt(s)));
    const bool degenerate = std::abs(dg_dr(r0, curv, c, m)) <= kDegenerateTolerance * slope_scale;
    return from_partial(r0, dG_dr(r0, 0.0, curv, c, m), degenerate);
  }
  const double q = eulerian_q(r0, curv);
  const double k = curv.kappa();
  const double scale = c * c * q / r0 + m * std::abs(5.0 - 4.0 * k * r0 * r0) / (4.0 * std::sqrt(q));
  const double u = u_value(r0, curv, c, m);
  if (std::abs(u) > kFixedPointTolerance * scale) {
    throw NotAFixedPoint(fmt::format("u({}) = {:.3e} does not vanish", r0, u));
  }
  const double slope_scale = c * c * std::abs(1.0 + k * r0 * r0) / (r0 * r0) +
                             std::abs(k * m * r0 * (4.0 * k * r0 * r0 - 3.0)) / (4.0 * q * std::sqrt(q));
  const bool degenerate = std::abs(du_dr(r0, curv, c, m)) <= kDegenerateTolerance * slope_scale;
  return from_partial(r0, dW_dr(r0, 0.0, curv, c, m), degenerate);
}

double nullcline_nu2(ReducedKind kind, double r, const Curvature& curv, double c, double m) {
  const double k = curv.kappa();
  if (kind == ReducedKind::Lagrangian) {
    const double q = lagrangian_q(r, curv);
    return q * q * g_value(r, curv, c, m) / (k * r * r * r);
  }
  const double q = eulerian_q(r, curv);
  return q * u_value(r, curv, c, m) / (k * r * r * r);
}

double slope(ReducedKind kind, double r, double nu, const Curvature& curv, double c, double m) {
  if (nu == 0.0) throw DomainError("the slope is undefined on nu = 0");
  const double field = kind == ReducedKind::Lagrangian ? G_value(r, nu, curv, c, m) : W_value(r, nu, curv, c, m);
  return field / nu;
}

double lagrangian_threshold(const Curvature& curv, double c, double m) {
  if (!curv.positive()) throw DomainError("the Lagrangian threshold applies to positive curvature");
  return std::sqrt(curv.kappa()) * c * c - 8.0 / std::sqrt(3.0) * m;
}

int eulerian_existence(const Curvature& curv, double c, double m) {
  if (curv.positive()) throw DomainError("the Eulerian existence sign applies to negative curvature");
  const double v = c * c * c * c * curv.kappa() + m * m;
  return (v > 0.0) - (v < 0.0);
}

}  // namespace curved3b
