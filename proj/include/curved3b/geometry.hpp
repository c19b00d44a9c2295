#pragma once

#include <cmath>

namespace curved3b {

/// Sign of the ambient metric: Euclidean for the sphere, Minkowski for the
/// hyperboloid.
enum class Signature : int { Spherical = 1, Hyperbolic = -1 };

inline double sign_value(Signature s) { return static_cast<int>(s); }

/// A point or velocity in the ambient 3-space.
struct SpaceVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  SpaceVector& operator+=(const SpaceVector& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  SpaceVector& operator-=(const SpaceVector& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  SpaceVector& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend SpaceVector operator+(SpaceVector a, const SpaceVector& b) { return a += b; }
  friend SpaceVector operator-(SpaceVector a, const SpaceVector& b) { return a -= b; }
  friend SpaceVector operator*(double s, SpaceVector a) { return a *= s; }
  friend SpaceVector operator*(SpaceVector a, double s) { return a *= s; }
  friend SpaceVector operator-(SpaceVector a) { return a *= -1.0; }
  friend bool operator==(const SpaceVector&, const SpaceVector&) = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

/// Nonzero Gaussian curvature together with its derived signature.
class Curvature {
 public:
  /// Throws DomainError for kappa == 0 or non-finite kappa.
  explicit Curvature(double kappa);

  double kappa() const { return kappa_; }
  Signature signature() const { return kappa_ > 0.0 ? Signature::Spherical : Signature::Hyperbolic; }
  double sigma() const { return sign_value(signature()); }
  bool positive() const { return kappa_ > 0.0; }
  /// |kappa|^{-1/2}: the radius of the sphere or the height of the hyperboloid vertex.
  double radius() const { return 1.0 / std::sqrt(std::abs(kappa_)); }

  friend bool operator==(const Curvature&, const Curvature&) = default;

 private:
  double kappa_;
};

/// Membership tolerance for manifold and tangency tests.
inline constexpr double kManifoldTolerance = 1e-10;

double signed_dot(const SpaceVector& a, const SpaceVector& b, Signature sigma);
SpaceVector signed_cross(const SpaceVector& a, const SpaceVector& b, Signature sigma);

/// kappa * (q . q) - 1; zero exactly on the manifold.
double manifold_residual(const SpaceVector& q, const Curvature& curv);

/// Radial rescaling of q onto the manifold. For negative curvature q must lie
/// inside the upper light cone; the result stays on the upper sheet.
SpaceVector project_position(const SpaceVector& q, const Curvature& curv);

/// Removes the component of v normal to the manifold at q (signed metric).
SpaceVector project_velocity(const SpaceVector& q, const SpaceVector& v, const Curvature& curv);

}  // namespace curved3b
