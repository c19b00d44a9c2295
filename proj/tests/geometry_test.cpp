#include <doctest.h>

#include "curved3b/errors.hpp"
#include "curved3b/geometry.hpp"
#include "support.hpp"

using namespace curved3b;
using testing::Rng;

TEST_SUITE("geometry") {
  TEST_CASE("curvature carries its signature") {
    CHECK(Curvature(2.0).sigma() == 1.0);
    CHECK(Curvature(-0.5).sigma() == -1.0);
    CHECK(Curvature(4.0).radius() == doctest::Approx(0.5));
    CHECK_THROWS_AS(Curvature(0.0), DomainError);
    CHECK_THROWS_AS(Curvature(std::nan("")), DomainError);
  }

  TEST_CASE("signed dot products") {
    CHECK(signed_dot({1, 0, 0}, {1, 0, 0}, Signature::Spherical) == 1.0);
    CHECK(signed_dot({0, 0, 1}, {0, 0, 1}, Signature::Hyperbolic) == -1.0);
    CHECK(signed_dot({1, 2, 3}, {4, 5, 6}, Signature::Spherical) == 32.0);
  }

  TEST_CASE("signed cross products") {
    CHECK(signed_cross({1, 0, 0}, {0, 1, 0}, Signature::Spherical) == SpaceVector{0, 0, 1});
    CHECK(signed_cross({1, 0, 0}, {0, 1, 0}, Signature::Hyperbolic) == SpaceVector{0, 0, -1});
    const SpaceVector a{0.3, -1.2, 2.5};
    for (Signature s : {Signature::Spherical, Signature::Hyperbolic}) {
      CHECK(signed_cross(a, a, s) == SpaceVector{0, 0, 0});
    }
  }

  TEST_CASE("manifold residual") {
    CHECK(manifold_residual({0, 0, 1}, Curvature(1.0)) == 0.0);
    CHECK(manifold_residual({0, 0, 1}, Curvature(-1.0)) == 0.0);
    CHECK(manifold_residual({2, 0, 0}, Curvature(1.0)) == 3.0);
  }

  TEST_CASE("position projection") {
    CHECK(project_position({0, 0, 1}, Curvature(1.0)) == SpaceVector{0, 0, 1});
    CHECK(project_position({0, 0, 2}, Curvature(1.0)) == SpaceVector{0, 0, 1});
    CHECK(project_position({0, 0, 2}, Curvature(-1.0)) == SpaceVector{0, 0, 1});
    CHECK_THROWS_AS(project_position({0, 0, 0}, Curvature(1.0)), DegenerateVector);
    CHECK_THROWS_AS(project_position({2, 0, 1}, Curvature(-1.0)), DegenerateVector);
    CHECK_THROWS_AS(project_position({0, 0, -1}, Curvature(-1.0)), DegenerateVector);
  }

  TEST_CASE("velocity projection") {
    const Curvature sphere(1.0);
    CHECK(project_velocity({0, 0, 1}, {1, 0, 0}, sphere) == SpaceVector{1, 0, 0});
    CHECK(project_velocity({0, 0, 1}, {0, 0, 5}, sphere) == SpaceVector{0, 0, 0});

    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
      const Curvature curv = testing::random_curvature(rng);
      const SpaceVector q = project_position(testing::random_vector(rng) + SpaceVector{0, 0, 3.0}, curv);
      const SpaceVector v = project_velocity(q, testing::random_vector(rng, 2.0), curv);
      CHECK(std::abs(signed_dot(q, v, curv.signature())) < 1e-12);
    }
  }

  TEST_CASE("signed dot is symmetric and bilinear") {
    Rng rng(12);
    for (int i = 0; i < 200; ++i) {
      const Signature s = testing::random_sign(rng) > 0 ? Signature::Spherical : Signature::Hyperbolic;
      const SpaceVector a = testing::random_vector(rng);
      const SpaceVector b = testing::random_vector(rng);
      const SpaceVector c = testing::random_vector(rng);
      const double alpha = testing::uniform(rng, -2.0, 2.0);
      CHECK(signed_dot(a, b, s) == signed_dot(b, a, s));
      CHECK(signed_dot(alpha * a + c, b, s) == doctest::Approx(alpha * signed_dot(a, b, s) + signed_dot(c, b, s)));
    }
  }

  TEST_CASE("cross product is orthogonal to its factors") {
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
      const SpaceVector a = testing::random_vector(rng);
      const SpaceVector b = testing::random_vector(rng);
      for (Signature s : {Signature::Spherical, Signature::Hyperbolic}) {
        CHECK(std::abs(signed_dot(a, signed_cross(a, b, s), s)) < 1e-14);
        CHECK(std::abs(signed_dot(b, signed_cross(a, b, s), s)) < 1e-14);
      }
    }
  }

  TEST_CASE("projections are idempotent and keep the upper sheet") {
    Rng rng(14);
    for (int i = 0; i < 200; ++i) {
      const Curvature curv = testing::random_curvature(rng);
      SpaceVector raw = testing::random_vector(rng);
      raw.z = std::abs(raw.z) + std::hypot(raw.x, raw.y) + 0.1;
      const SpaceVector q = project_position(raw, curv);
      CHECK(std::abs(manifold_residual(q, curv)) < 1e-14);
      CHECK(testing::distance(project_position(q, curv), q) < 1e-14 * std::max(1.0, testing::max_abs(q)));
      if (!curv.positive()) CHECK(q.z > 0.0);
      const SpaceVector v = project_velocity(q, testing::random_vector(rng), curv);
      CHECK(testing::distance(project_velocity(q, v, curv), v) < 1e-14 * std::max(1.0, testing::max_abs(q)));
    }
  }
}
