#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "curved3b/dynamics.hpp"
#include "curved3b/geometry.hpp"

namespace testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

inline double random_sign(Rng& rng) { return uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0; }

inline curved3b::Curvature random_curvature(Rng& rng, double lo = 0.3, double hi = 3.0) {
  return curved3b::Curvature(random_sign(rng) * log_uniform(rng, lo, hi));
}

inline curved3b::SpaceVector random_vector(Rng& rng, double scale = 1.0) {
  return {uniform(rng, -scale, scale), uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
}

inline double max_abs(const curved3b::SpaceVector& v) {
  return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)});
}

inline double distance(const curved3b::SpaceVector& a, const curved3b::SpaceVector& b) { return max_abs(a - b); }

inline double relative_error(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace testing
