#include "curved3b/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "curved3b/errors.hpp"

namespace curved3b {

namespace {

using Real = Polynomial::Real;

constexpr Real kBisectionTolerance = 1e-6L;
constexpr Real kNewtonTolerance = 1e-17L;
constexpr Real kTouchTolerance = 1e-14L;
constexpr Real kMergeTolerance = 1e-7L;
constexpr Real kSturmTrim = 1e-12L;

int sign(Real v) { return (v > 0.0L) - (v < 0.0L); }

Polynomial trim_relative(const Polynomial& p, Real scale) {
  std::vector<Real> c = p.coefficients();
  for (Real& a : c) {
    if (std::abs(a) <= kSturmTrim * scale) a = 0.0L;
  }
  return Polynomial(std::move(c));
}

Real max_abs_coefficient(const Polynomial& p) {
  Real s = 0.0L;
  for (Real a : p.coefficients()) s = std::max(s, std::abs(a));
  return s;
}

int sign_changes(const std::vector<Polynomial>& chain, Real x) {
  int changes = 0;
  int last = 0;
  for (const Polynomial& p : chain) {
    const int s = sign(p(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

// Root of p in [lo, hi] given a sign change, bisection first and Newton after.
Real refine(const Polynomial& p, const Polynomial& dp, Real lo, Real hi) {
  Real flo = p(lo);
  if (flo == 0.0L) return lo;
  if (p(hi) == 0.0L) return hi;
  while (hi - lo > kBisectionTolerance * std::max(1.0L, std::abs(hi))) {
    const Real mid = 0.5L * (lo + hi);
    const Real fm = p(mid);
    if (fm == 0.0L) return mid;
    if (sign(fm) == sign(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  Real x = 0.5L * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const Real fx = p(x);
    if (fx == 0.0L) return x;
    if (sign(fx) == sign(flo)) {
      lo = x;
    } else {
      hi = x;
    }
    const Real d = dp(x);
    Real next = d != 0.0L ? x - fx / d : 0.5L * (lo + hi);
    // Newton leaving the bracket falls back to bisection.
    if (!(next > lo && next < hi)) next = 0.5L * (lo + hi);
    if (std::abs(next - x) <= kNewtonTolerance * std::max(1.0L, std::abs(x)) || !(hi > lo)) return next;
    x = next;
  }
  return x;
}

std::vector<Real> real_roots_in(const Polynomial& p, Real lo, Real hi) {
  std::vector<Real> roots;
  if (p.degree() <= 0) return roots;
  const Polynomial dp = p.derivative();
  std::vector<Real> points{lo};
  for (Real c : real_roots_in(dp, lo, hi)) {
    if (c > lo && c < hi) points.push_back(c);
  }
  points.push_back(hi);

  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (sign(p(points[i])) * sign(p(points[i + 1])) < 0) roots.push_back(refine(p, dp, points[i], points[i + 1]));
  }
  // Critical points where p touches zero without changing sign.
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const Real x = points[i];
    if (std::abs(p(x)) <= kTouchTolerance * p.magnitude(x)) roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  std::vector<Real> merged;
  for (Real r : roots) {
    if (!merged.empty() && std::abs(r - merged.back()) <= kMergeTolerance * std::max(1.0L, std::abs(r))) continue;
    merged.push_back(r);
  }
  return merged;
}

}  // namespace

Polynomial::Polynomial(std::vector<Real> ascending) : coeffs_(std::move(ascending)) {
  while (!coeffs_.empty() && coeffs_.back() == 0.0L) coeffs_.pop_back();
}

Real Polynomial::coefficient(int i) const {
  return i >= 0 && i < static_cast<int>(coeffs_.size()) ? coeffs_[static_cast<std::size_t>(i)] : 0.0L;
}

Real Polynomial::operator()(Real x) const {
  Real v = 0.0L;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * x + *it;
  return v;
}

Polynomial Polynomial::derivative() const {
  std::vector<Real> d;
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d.push_back(static_cast<Real>(i) * coeffs_[i]);
  return Polynomial(std::move(d));
}

Real Polynomial::magnitude(Real x) const {
  Real v = 0.0L;
  const Real ax = std::abs(x);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * ax + std::abs(*it);
  return v;
}

Polynomial remainder(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw DomainError("division by the zero polynomial");
  std::vector<Real> r = a.coefficients();
  const int db = b.degree();
  const Real lead = b.leading();
  for (int k = static_cast<int>(r.size()) - 1; k >= db; --k) {
    const Real q = r[static_cast<std::size_t>(k)] / lead;
    for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k - db + j)] -= q * b.coefficient(j);
    r[static_cast<std::size_t>(k)] = 0.0L;
  }
  r.resize(static_cast<std::size_t>(std::max(db, 0)));
  return Polynomial(std::move(r));
}

double cauchy_bound(const Polynomial& p) {
  if (p.degree() < 1) return 1.0;
  Real m = 0.0L;
  for (int i = 0; i < p.degree(); ++i) m = std::max(m, std::abs(p.coefficient(i) / p.leading()));
  return static_cast<double>(1.0L + m);
}

int sturm_count(const Polynomial& p, double a, double b) {
  if (p.degree() < 1) return 0;
  const Real scale = max_abs_coefficient(p);
  std::vector<Polynomial> chain{p, p.derivative()};
  while (chain.back().degree() > 0) {
    const Polynomial& prev = chain[chain.size() - 2];
    Polynomial r = trim_relative(remainder(prev, chain.back()), scale);
    if (r.is_zero()) break;
    std::vector<Real> neg = r.coefficients();
    for (Real& c : neg) c = -c;
    chain.emplace_back(std::move(neg));
  }
  return sign_changes(chain, a) - sign_changes(chain, b);
}

std::vector<double> positive_roots(const Polynomial& p, double upper) {
  if (p.is_zero()) throw DomainError("the zero polynomial has every point as a root");
  std::vector<double> roots;
  for (Real r : real_roots_in(p, 0.0L, upper)) {
    const double x = static_cast<double>(r);
    if (x > 0.0 && x < upper) roots.push_back(x);
  }
  return roots;
}

double resultant(const Polynomial& p, const Polynomial& q) {
  if (p.is_zero() || q.is_zero()) throw DomainError("resultant of a zero polynomial");
  const int m = p.degree();
  const int n = q.degree();
  if (m == 0 && n == 0) return 1.0;
  if (m == 0) return static_cast<double>(std::pow(p.leading(), n));
  if (n == 0) return static_cast<double>(std::pow(q.leading(), m));
  const std::size_t size = static_cast<std::size_t>(m + n);
  std::vector<std::vector<Real>> s(size, std::vector<Real>(size, 0.0L));
  // Rows hold descending coefficients shifted one column per row.
  for (int row = 0; row < n; ++row) {
    for (int j = 0; j <= m; ++j) {
      s[static_cast<std::size_t>(row)][static_cast<std::size_t>(row + j)] = p.coefficient(m - j);
    }
  }
  for (int row = 0; row < m; ++row) {
    for (int j = 0; j <= n; ++j) {
      s[static_cast<std::size_t>(n + row)][static_cast<std::size_t>(row + j)] = q.coefficient(n - j);
    }
  }
  Real det = 1.0L;
  for (std::size_t col = 0; col < size; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < size; ++r) {
      if (std::abs(s[r][col]) > std::abs(s[pivot][col])) pivot = r;
    }
    if (s[pivot][col] == 0.0L) return 0.0;
    if (pivot != col) {
      std::swap(s[pivot], s[col]);
      det = -det;
    }
    det *= s[col][col];
    for (std::size_t r = col + 1; r < size; ++r) {
      const Real f = s[r][col] / s[col][col];
      for (std::size_t c = col; c < size; ++c) s[r][c] -= f * s[col][c];
    }
  }
  return static_cast<double>(det);
}

}  // namespace curved3b
