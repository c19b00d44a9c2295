#include "curved3b/geometry.hpp"

#include <fmt/format.h>

#include "curved3b/errors.hpp"

namespace curved3b {

Curvature::Curvature(double kappa) : kappa_(kappa) {
  if (!(kappa != 0.0) || !std::isfinite(kappa)) {
    throw DomainError(fmt::format("curvature must be finite and nonzero, got {}", kappa));
  }
}

double signed_dot(const SpaceVector& a, const SpaceVector& b, Signature sigma) {
  return a.x * b.x + a.y * b.y + sign_value(sigma) * a.z * b.z;
}

SpaceVector signed_cross(const SpaceVector& a, const SpaceVector& b, Signature sigma) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, sign_value(sigma) * (a.x * b.y - a.y * b.x)};
}

double manifold_residual(const SpaceVector& q, const Curvature& curv) {
  return curv.kappa() * signed_dot(q, q, curv.signature()) - 1.0;
}

SpaceVector project_position(const SpaceVector& q, const Curvature& curv) {
  const double qq = signed_dot(q, q, curv.signature());
  if (curv.positive()) {
    if (!(qq > 0.0) || !q.finite()) {
      throw DegenerateVector("cannot project the zero vector onto the sphere");
    }
  } else if (!(q.z > 0.0) || !(qq < 0.0) || !q.finite()) {
    throw DegenerateVector(
        fmt::format("point ({}, {}, {}) is outside the upper light cone", q.x, q.y, q.z));
  }
  return q * (1.0 / std::sqrt(std::abs(curv.kappa() * qq)));
}

SpaceVector project_velocity(const SpaceVector& q, const SpaceVector& v, const Curvature& curv) {
  const Signature s = curv.signature();
  // Use q.q rather than 1/kappa so the projection is exact even off-manifold.
  const double qq = signed_dot(q, q, s);
  if (qq == 0.0) {
    return v;
  }
  return v - q * (signed_dot(q, v, s) / qq);
}

}  // namespace curved3b
