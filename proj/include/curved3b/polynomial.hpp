#pragma once

#include <vector>

namespace curved3b {

/// Real polynomial with coefficients in ascending degree. Trailing zero
/// coefficients are trimmed on construction; the zero polynomial has no
/// coefficients.
///
/// Coefficients are long double. The Eulerian cubic is close to a double root
/// when c^4 kappa is small next to m^2, and rounding its coefficients to double
/// already moves the discriminant by parts in 1e9.
class Polynomial {
 public:
  using Real = long double;

  Polynomial() = default;
  explicit Polynomial(std::vector<Real> ascending);

  const std::vector<Real>& coefficients() const { return coeffs_; }
  /// Degree, or -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  Real leading() const { return coeffs_.empty() ? 0.0L : coeffs_.back(); }
  Real coefficient(int i) const;

  Real operator()(Real x) const;
  Polynomial derivative() const;

  /// sum |a_i| |x|^i, the scale used to judge whether p(x) is zero.
  Real magnitude(Real x) const;

 private:
  std::vector<Real> coeffs_;
};

/// Remainder of a divided by b. Throws DomainError when b is zero.
Polynomial remainder(const Polynomial& a, const Polynomial& b);

/// Cauchy bound: every root has modulus below 1 + max |a_i / a_n|.
double cauchy_bound(const Polynomial& p);

/// Number of distinct real roots in (a, b] from a Sturm sequence.
int sturm_count(const Polynomial& p, double a, double b);

/// Sorted roots in (0, upper), double roots included once. Brackets are found
/// between critical points, tightened by bisection and finished by Newton.
std::vector<double> positive_roots(const Polynomial& p, double upper);

/// Determinant of the Sylvester matrix of p and q.
double resultant(const Polynomial& p, const Polynomial& q);

}  // namespace curved3b
