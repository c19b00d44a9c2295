#include <doctest.h>

#include <numbers>

#include "curved3b/dynamics.hpp"
#include "curved3b/errors.hpp"
#include "curved3b/homographic.hpp"
#include "curved3b/verify.hpp"
#include "support.hpp"

using namespace curved3b;
using testing::Rng;

namespace {

// Equal masses on the equator at angles 0, 2pi/3, 4pi/3.
SystemState equatorial_triangle(double kappa, double m) {
  SystemState s;
  s.curv = Curvature(kappa);
  const double r = s.curv.radius();
  for (std::size_t i = 0; i < kBodyCount; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / 3.0;
    s.bodies[i] = Body{m, {r * std::cos(a), r * std::sin(a), 0.0}, {}};
  }
  return s;
}

// Light bodies that rarely meet, so ten time units stay far from collisions.
SystemState nonsingular_state(Rng& rng) {
  for (;;) {
    const Curvature curv = testing::random_curvature(rng);
    SystemState s = random_system_state(rng, curv, 0.05, {0.1, 0.5}, 1.0);
    StepControl ctrl;
    ctrl.singularity_guard = 1e-3;
    const TrajectorySeries run = integrate(s, 10.0, ctrl);
    if (run.reason != TerminationReason::Completed) continue;
    double far = 0.0;
    for (const TrajectorySample& x : run.samples) {
      for (const Body& b : x.state.bodies) far = std::max(far, testing::max_abs(b.q));
    }
    if (far < 100.0 * std::max(1.0, curv.radius())) return s;
  }
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("force function on orthogonal positions") {
    SystemState s;
    s.curv = Curvature(1.0);
    s.bodies[0] = Body{1.0, {1, 0, 0}, {}};
    s.bodies[1] = Body{1.0, {0, 1, 0}, {}};
    s.bodies[2] = Body{0.0, {0, 0, 1}, {}};
    CHECK(force_function(s) == 0.0);
  }

  TEST_CASE("force function at the equatorial triangle") {
    for (double m : {0.5, 1.0, 2.0}) {
      CHECK(force_function(equatorial_triangle(1.0, m)) == doctest::Approx(-std::sqrt(3.0) * m * m).epsilon(1e-14));
    }
  }

  TEST_CASE("coincident bodies are singular") {
    SystemState s = equatorial_triangle(1.0, 1.0);
    s.bodies[1].q = s.bodies[0].q;
    CHECK_THROWS_AS(force_function(s), SingularConfiguration);
    CHECK_THROWS_AS(force_gradient(s, 0), SingularConfiguration);
    CHECK_THROWS_AS(accelerations(s), SingularConfiguration);
    s.bodies[1].q = -s.bodies[0].q;  // antipodal
    CHECK_THROWS_AS(force_function(s), SingularConfiguration);
  }

  TEST_CASE("gradient vanishes without partners") {
    SystemState s = equatorial_triangle(1.0, 1.0);
    s.bodies[1].mass = 0.0;
    s.bodies[2].mass = 0.0;
    CHECK(force_gradient(s, 0) == SpaceVector{0, 0, 0});
  }

  TEST_CASE("equatorial triangle is an equilibrium") {
    for (double kappa : {0.5, 1.0, 3.0}) {
      const auto acc = accelerations(equatorial_triangle(kappa, 1.3));
      for (const SpaceVector& a : acc) CHECK(testing::max_abs(a) < 1e-12);
    }
  }

  TEST_CASE("velocity term is the only normal part of the acceleration") {
    Rng rng(21);
    for (int i = 0; i < 50; ++i) {
      SystemState s = random_system_state(rng, testing::random_curvature(rng));
      const double sigma = s.curv.sigma();
      const Signature sig = s.curv.signature();
      auto acc = accelerations(s);
      for (std::size_t b = 0; b < kBodyCount; ++b) {
        // q . a = -v . v on the manifold
        const double want = -signed_dot(s.bodies[b].v, s.bodies[b].v, sig);
        CHECK(signed_dot(s.bodies[b].q, acc[b], sig) == doctest::Approx(want).epsilon(1e-10).scale(1.0));
      }
      for (Body& b : s.bodies) b.v = {};
      acc = accelerations(s);
      for (std::size_t b = 0; b < kBodyCount; ++b) {
        CHECK(std::abs(signed_dot(s.bodies[b].q, acc[b], sig)) < 1e-10 * (1.0 + testing::max_abs(acc[b])));
      }
      (void)sigma;
    }
  }

  TEST_CASE("energy of resting configurations") {
    const SystemState s = equatorial_triangle(1.0, 1.5);
    CHECK(energy(s) == doctest::Approx(std::sqrt(3.0) * 1.5 * 1.5).epsilon(1e-14));
    CHECK(kinetic_energy(s) == 0.0);
    Rng rng(22);
    for (int i = 0; i < 20; ++i) {
      SystemState r = random_system_state(rng, testing::random_curvature(rng));
      for (Body& b : r.bodies) b.v = {};
      CHECK(energy(r) == -force_function(r));
      CHECK(angular_momentum(r) == SpaceVector{0, 0, 0});
    }
  }

  TEST_CASE("angular momentum of the Lagrangian ansatz") {
    const Curvature curv(1.0);
    const double m = 0.7;
    const double c = 0.9;
    const SystemState s = embed_lagrangian({0.6, 0.2, 0.4, c}, curv, m);
    const SpaceVector l = angular_momentum(s);
    CHECK(std::abs(l.x) < 1e-14);
    CHECK(std::abs(l.y) < 1e-14);
    CHECK(l.z == doctest::Approx(3.0 * m * c).epsilon(1e-14));
  }

  TEST_CASE("force gradient matches finite differences") {
    Rng rng(23);
    int done = 0;
    while (done < 100) {
      const SystemState s = random_system_state(rng, testing::random_curvature(rng), 0.05);
      const std::size_t i = static_cast<std::size_t>(done % 3);
      const SpaceVector d = project_velocity(s.bodies[i].q, testing::random_vector(rng), s.curv);
      const double h = 1e-5;
      SystemState plus = s;
      SystemState minus = s;
      plus.bodies[i].q += h * d;
      minus.bodies[i].q -= h * d;
      const double fd = (force_function(plus) - force_function(minus)) / (2.0 * h);
      const double analytic = signed_dot(force_gradient(s, i), d, s.curv.signature());
      CHECK(std::abs(fd - analytic) < 1e-6 * std::max(1.0, std::abs(analytic)));
      ++done;
    }
  }

  TEST_CASE("equilibrium stays put under integration") {
    const SystemState s = equatorial_triangle(1.0, 1.0);
    const TrajectorySeries run = integrate(s, 7.0);
    CHECK(run.reason == TerminationReason::Completed);
    for (const TrajectorySample& x : run.samples) {
      for (std::size_t b = 0; b < kBodyCount; ++b) {
        CHECK(testing::distance(x.state.bodies[b].q, s.bodies[b].q) < 1e-10);
        CHECK(testing::max_abs(x.state.bodies[b].v) < 1e-10);
      }
    }
  }

  TEST_CASE("homothetic release collapses") {
    const TrajectorySeries run = integrate(embed_lagrangian({0.5, 0.0, 0.0, 0.0}, Curvature(1.0), 1.0), 10.0);
    CHECK(run.reason == TerminationReason::CollisionApproach);
    CHECK(run.samples.back().state.t < 10.0);
  }

  TEST_CASE("samples are strictly increasing in time and stay on the manifold") {
    Rng rng(24);
    for (int i = 0; i < 5; ++i) {
      const TrajectorySeries run = integrate(nonsingular_state(rng), 10.0);
      for (std::size_t k = 1; k < run.samples.size(); ++k) {
        CHECK(run.samples[k].state.t > run.samples[k - 1].state.t);
      }
      for (const TrajectorySample& x : run.samples) {
        const ConstraintResiduals r = constraint_residuals(x.state);
        CHECK(r.manifold < 1e-10);
        CHECK(r.tangency < 1e-10);
      }
      const ConservationDrift d = conservation_drift(run);
      CHECK(d.energy < 1e-8);
      CHECK(d.angular_momentum < 1e-8);
    }
  }

  TEST_CASE("time reversal returns to the start") {
    Rng rng(25);
    for (int i = 0; i < 5; ++i) {
      const SystemState s = nonsingular_state(rng);
      const TrajectorySeries forward = integrate(s, 3.0);
      REQUIRE(forward.reason == TerminationReason::Completed);
      SystemState back = reversed(forward.samples.back().state);
      const TrajectorySeries backward = integrate(back, back.t + 3.0);
      REQUIRE(backward.reason == TerminationReason::Completed);
      const SystemState end = reversed(backward.samples.back().state);
      for (std::size_t b = 0; b < kBodyCount; ++b) {
        CHECK(testing::distance(end.bodies[b].q, s.bodies[b].q) < 1e-6);
        CHECK(testing::distance(end.bodies[b].v, s.bodies[b].v) < 1e-6);
      }
    }
  }

  TEST_CASE("fast bodies on the hyperboloid escape") {
    SystemState s;
    s.curv = Curvature(-1.0);
    const double x[3] = {-1.0, 0.0, 1.0};
    for (std::size_t b = 0; b < kBodyCount; ++b) {
      const SpaceVector q = project_position({x[b], 0.0, std::sqrt(1.0 + x[b] * x[b])}, s.curv);
      s.bodies[b] = Body{0.1, q, project_velocity(q, {20.0 * x[b], 0.0, 0.0}, s.curv)};
    }
    s.bodies[1].v = {0.0, 20.0, 0.0};
    const TrajectorySeries run = integrate(s, 10.0);
    CHECK(run.reason == TerminationReason::Escaped);
  }

  TEST_CASE("integration needs a later end time") {
    CHECK_THROWS_AS(integrate(equatorial_triangle(1.0, 1.0), 0.0), DomainError);
    SystemState bad = equatorial_triangle(1.0, 1.0);
    bad.bodies[0].q.x *= 1.1;
    CHECK_THROWS_AS(integrate(bad, 1.0), DomainError);
  }
}
