#pragma once

#include <array>
#include <complex>
#include <string_view>
#include <vector>

#include "curved3b/geometry.hpp"
#include "curved3b/homographic.hpp"
#include "curved3b/polynomial.hpp"

namespace curved3b {

enum class FixedPointKind { Interior, EquatorBoundary };
enum class Stability { Center, Saddle, Degenerate, BoundaryNonhyperbolic };

std::string_view to_string(FixedPointKind kind);
std::string_view to_string(Stability stability);
FixedPointKind fixed_point_kind_from_string(std::string_view name);
Stability stability_from_string(std::string_view name);

/// Fixed point (r, 0) of a reduced system. Eigenvalues are +-sqrt(dG/dr) or
/// +-sqrt(dW/dr); the equator point has no linearization and carries zeros.
struct FixedPointRecord {
  double r = 0.0;
  FixedPointKind kind = FixedPointKind::Interior;
  std::array<std::complex<double>, 2> eigenvalues{};
  Stability stability = Stability::Degenerate;
};

// --- Lagrangian diagnostics; need r > 0 and 12 - 9 kappa r^2 > 0 -------------

double g_value(double r, const Curvature& curv, double c, double m);
double dg_dr(double r, const Curvature& curv, double c, double m);
double d2g_dr2(double r, const Curvature& curv, double c, double m);

/// g1 = (1 - kappa r^2) / r^2 and g2 = -kappa r nu^2 / (1 - kappa r^2).
double g1_value(double r, const Curvature& curv);
double g2_value(double r, double nu, const Curvature& curv);
double dg2_dr(double r, double nu, const Curvature& curv);

/// Right-hand side of the Lagrangian nu equation, G = g1 g + g2.
double G_value(double r, double nu, const Curvature& curv, double c, double m);
double dG_dr(double r, double nu, const Curvature& curv, double c, double m);

// --- Eulerian diagnostics; need r > 0 and 1 - kappa r^2 > 0 ------------------

double u_value(double r, const Curvature& curv, double c, double m);
double du_dr(double r, const Curvature& curv, double c, double m);

/// Right-hand side of the Eulerian nu equation, W = u / r^2 + g2.
double W_value(double r, double nu, const Curvature& curv, double c, double m);
double dW_dr(double r, double nu, const Curvature& curv, double c, double m);

// --- polynomials in x = r^2 --------------------------------------------------

/// p(x) = 576 m^2 x - c^4 (12 - 9 kappa x)^3, whose positive roots in the
/// domain are the squares of the roots of g.
Polynomial lagrangian_polynomial(const Curvature& curv, double c, double m);

/// q(x) = m^2 x (5 - 4 kappa x)^2 - 16 c^4 (1 - kappa x)^3, the squared form of
/// u(r) = 0.
Polynomial eulerian_polynomial(const Curvature& curv, double c, double m);

// --- fixed points --------------------------------------------------------------

/// For kappa > 0 the equator point comes last.
std::vector<FixedPointRecord> lagrangian_fixed_points(const Curvature& curv, double c, double m);
std::vector<FixedPointRecord> eulerian_fixed_points(const Curvature& curv, double c, double m);
std::vector<FixedPointRecord> fixed_points(ReducedKind kind, const Curvature& curv, double c, double m);

/// Linearization at (r0, 0). Throws NotAFixedPoint when the field does not
/// vanish there.
FixedPointRecord classify(ReducedKind kind, double r0, const Curvature& curv, double c, double m);

/// nu^2 on the nu' = 0 nullcline at r; negative when the nullcline misses r.
double nullcline_nu2(ReducedKind kind, double r, const Curvature& curv, double c, double m);

/// nu' / r' at (r, nu). Throws DomainError for nu = 0.
double slope(ReducedKind kind, double r, double nu, const Curvature& curv, double c, double m);

/// kappa^{1/2} c^2 - (8 / sqrt 3) m; negative iff the kappa > 0 Lagrangian
/// system has an interior fixed point.
double lagrangian_threshold(const Curvature& curv, double c, double m);

/// Sign of c^4 kappa + m^2 for kappa < 0.
int eulerian_existence(const Curvature& curv, double c, double m);

}  // namespace curved3b
