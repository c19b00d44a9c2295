#include "curved3b/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "curved3b/errors.hpp"
#include "curved3b/fixedpoints.hpp"
#include "curved3b/flowatlas.hpp"
#include "curved3b/homographic.hpp"
#include "curved3b/presets.hpp"

namespace curved3b {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double log_uniform(Rng& rng, double lo, double hi) { return std::exp(uniform(rng, std::log(lo), std::log(hi))); }

double random_sign(Rng& rng) { return uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0; }

int trials_or(const VerifyOptions& opts, int fallback) { return opts.trials > 0 ? opts.trials : fallback; }

struct Outcome {
  bool passed = true;
  std::string detail;
};

Outcome fail(std::string detail) { return {false, std::move(detail)}; }

// --- 1 -------------------------------------------------------------------------

Outcome check_fixed_points(const VerifyOptions&) {
  const auto fps = lagrangian_fixed_points(Curvature(-0.3), 0.23, 0.12);
  if (fps.size() != 2) return fail(fmt::format("expected 2 fixed points, found {}", fps.size()));
  const double e1 = std::abs(fps[0].r - 1.0882233);
  const double e2 = std::abs(fps[1].r - 2.0007055);
  const bool ok = e1 < 1e-6 && e2 < 1e-6 && fps[0].stability == Stability::Center &&
                  fps[1].stability == Stability::Saddle;
  std::string detail = fmt::format("r1={:.9f} ({}), r2={:.9f} ({}), errors {:.1e}, {:.1e}", fps[0].r,
                                   to_string(fps[0].stability), fps[1].r, to_string(fps[1].stability), e1, e2);
  return {ok, detail};
}

// --- 2 -------------------------------------------------------------------------

Outcome check_resultant(const VerifyOptions& opts) {
  Rng rng(opts.seed);
  const int n = trials_or(opts, 100);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = random_sign(rng) * log_uniform(rng, 0.1, 5.0);
    const double c = log_uniform(rng, 0.1, 3.0);
    const double m = log_uniform(rng, 0.05, 5.0);
    const Polynomial q = eulerian_polynomial(Curvature(k), c, m);
    const double res = resultant(q, q.derivative());
    const double c4 = std::pow(c, 4);
    const double closed = 1024.0 * c4 * std::pow(k, 5) * std::pow(m, 4) * (c4 * k + m * m) *
                          (108.0 * c4 * k + 125.0 * m * m);
    worst = std::max(worst, std::abs(res - closed) / std::abs(closed));
  }
  return {worst < 1e-9, fmt::format("{} trials, worst relative error {:.2e}", n, worst)};
}

// --- 3 -------------------------------------------------------------------------

Outcome check_counts(const VerifyOptions& opts) {
  Rng rng(opts.seed + 3);
  const int n = trials_or(opts, 500);
  int sturm_mismatch = 0;
  int lemma_mismatch = 0;
  int residual_failures = 0;
  std::array<std::array<int, 3>, 4> histogram{};

  for (int regime = 0; regime < 4; ++regime) {
    const bool lagrangian = regime < 2;
    const bool positive = regime % 2 == 0;
    for (int i = 0; i < n; ++i) {
      const Curvature curv((positive ? 1.0 : -1.0) * log_uniform(rng, 0.05, 5.0));
      const double c = log_uniform(rng, 0.05, 3.0);
      const double m = log_uniform(rng, 0.01, 10.0);
      const double k = curv.kappa();
      const Polynomial p = lagrangian ? lagrangian_polynomial(curv, c, m) : eulerian_polynomial(curv, c, m);
      const double upper = positive ? 1.0 / k : cauchy_bound(p);
      const auto roots = positive_roots(p, upper);
      if (sturm_count(p, 0.0, upper) != static_cast<int>(roots.size())) ++sturm_mismatch;

      const auto fps = lagrangian ? lagrangian_fixed_points(curv, c, m) : eulerian_fixed_points(curv, c, m);
      std::size_t interior = 0;
      for (const FixedPointRecord& fp : fps) {
        if (fp.kind != FixedPointKind::Interior) continue;
        ++interior;
        const double residual = lagrangian ? g_value(fp.r, curv, c, m) : u_value(fp.r, curv, c, m);
        if (!(std::abs(residual) < 1e-8)) ++residual_failures;
        if (positive && !(fp.r > 0.0 && fp.r < curv.radius())) ++lemma_mismatch;
      }
      histogram[static_cast<std::size_t>(regime)][std::min<std::size_t>(interior, 2)]++;

      std::size_t expected = interior;
      if (lagrangian && positive) {
        expected = lagrangian_threshold(curv, c, m) < 0.0 ? 1 : 0;
        if (fps.size() != expected + 1) ++lemma_mismatch;
      } else if (!lagrangian && positive) {
        expected = 1;
      } else if (!lagrangian) {
        expected = eulerian_existence(curv, c, m) > 0 ? 1 : 0;
      } else if (interior > 2) {
        ++lemma_mismatch;
      }
      if (interior != expected) ++lemma_mismatch;
    }
  }
  const bool ok = sturm_mismatch == 0 && lemma_mismatch == 0 && residual_failures == 0;
  std::string detail = fmt::format(
      "{} per regime; sturm mismatches {}, count mismatches {}, residual failures {}; interior counts "
      "[0,1,2]: L+ {} L- {} E+ {} E- {}",
      n, sturm_mismatch, lemma_mismatch, residual_failures, histogram[0], histogram[1], histogram[2],
      histogram[3]);
  return {ok, detail};
}

// --- 4 -------------------------------------------------------------------------

constexpr double kFarOut = 100.0;

double max_coordinate(const TrajectorySeries& series) {
  double m = 0.0;
  for (const TrajectorySample& s : series.samples) {
    for (const Body& b : s.state.bodies) m = std::max({m, std::abs(b.q.x), std::abs(b.q.y), std::abs(b.q.z)});
  }
  return m;
}

Outcome check_conservation(const VerifyOptions& opts) {
  Rng rng(opts.seed + 4);
  const int n = trials_or(opts, 20);
  double worst_energy = 0.0;
  double worst_momentum = 0.0;
  double worst_manifold = 0.0;
  double worst_tangency = 0.0;
  int redraws = 0;
  int underflows = 0;
  // A run is nonsingular when every pair gap stays above 1e-3 and every
  // coordinate within kFarOut radii; the guard stops the others early.
  StepControl ctrl;
  ctrl.singularity_guard = 1e-3;
  ctrl.max_steps = 200'000;
  for (int i = 0; i < n; ++i) {
    TrajectorySeries series;
    for (;;) {
      const Curvature curv(random_sign(rng) * log_uniform(rng, 0.3, 3.0));
      const double far = kFarOut * std::max(1.0, curv.radius());
      const SystemState s = random_system_state(rng, curv, 0.05, {0.1, 0.5}, 1.0);
      try {
        series = integrate(s, 10.0, ctrl);
      } catch (const StepUnderflow&) {
        ++underflows;
        continue;
      }
      if (series.reason == TerminationReason::Completed && max_coordinate(series) <= far) break;
      ++redraws;
    }
    const ConservationDrift d = conservation_drift(series);
    worst_energy = std::max(worst_energy, d.energy);
    worst_momentum = std::max(worst_momentum, d.angular_momentum);
    for (const TrajectorySample& s : series.samples) {
      const ConstraintResiduals r = constraint_residuals(s.state);
      worst_manifold = std::max(worst_manifold, r.manifold);
      worst_tangency = std::max(worst_tangency, r.tangency);
    }
  }
  const bool ok = worst_energy < 1e-8 && worst_momentum < 1e-8 && worst_manifold < 1e-10 && worst_tangency < 1e-10;
  return {ok, fmt::format("{} states ({} redrawn as singular or far out, {} after step underflow), energy drift "
                          "{:.2e}, momentum drift {:.2e}, manifold {:.2e}, tangency {:.2e}",
                          n, redraws, underflows, worst_energy, worst_momentum, worst_manifold, worst_tangency)};
}

// --- 5 -------------------------------------------------------------------------

Outcome check_reduced_vs_full(const VerifyOptions& opts) {
  Rng rng(opts.seed + 5);
  const int n = trials_or(opts, 20);
  double worst = 0.0;
  int redraws = 0;
  for (ReducedKind kind : {ReducedKind::Lagrangian, ReducedKind::Eulerian}) {
    for (int i = 0; i < n; ++i) {
      for (;;) {
        const Curvature curv(random_sign(rng) * log_uniform(rng, 0.3, 3.0));
        const double m = log_uniform(rng, 0.2, 2.0);
        const double scale = curv.positive() ? curv.radius() : 1.0;
        const ReducedState rs{uniform(rng, 0.3, 0.8) * scale, uniform(rng, -0.2, 0.2), uniform(rng, 0.0, 6.0),
                              random_sign(rng) * log_uniform(rng, 0.2, 1.5)};
        const ReducedSeries reduced = integrate_reduced(kind, rs, curv, m, 5.0);
        // Close approaches amplify roundoff through the symmetry-breaking
        // instability of the full problem, and far out on the hyperboloid the
        // embedding loses digits to cancellation; neither run is comparable.
        double r_min = rs.r;
        double r_max = rs.r;
        for (const ReducedSample& s : reduced.samples) {
          r_min = std::min(r_min, s.r);
          r_max = std::max(r_max, s.r);
        }
        if (reduced.reason != TerminationReason::Completed || r_min < 0.1 * rs.r ||
            r_max > kFarOut * std::max(1.0, curv.radius())) {
          ++redraws;
          continue;
        }
        const TrajectorySeries full = integrate(embed(kind, rs, curv, m), 5.0);
        if (full.reason != TerminationReason::Completed) {
          ++redraws;
          continue;
        }
        for (const TrajectorySample& s : full.samples) {
          const double r = reduced.size_at(s.state.t);
          worst = std::max(worst, std::abs(reduced_size(kind, s.state) - r) / std::max(1.0, r));
        }
        break;
      }
    }
  }
  return {worst < 1e-6, fmt::format("{} Lagrangian + {} Eulerian runs ({} redrawn), max |r_full - r_reduced| / max(1, r) {:.2e}",
                                    n, n, redraws, worst)};
}

// --- 6 -------------------------------------------------------------------------

std::size_t count_class(const PortraitData& d, OrbitClass cls) {
  return static_cast<std::size_t>(
      std::count_if(d.cells.begin(), d.cells.end(), [&](const PortraitCell& c) { return c.valid && c.cls == cls; }));
}

PortraitData preset_portrait(std::string_view name, std::size_t grid) {
  const Preset& p = find_preset(name);
  return sweep(p.kind, Curvature(p.kappa), p.c, p.m, p.r_range, p.nu_range, grid, grid, p.t_span);
}

Outcome check_taxonomy(const VerifyOptions& opts) {
  const std::size_t grid = static_cast<std::size_t>(trials_or(opts, 15));
  std::vector<std::string> failures;

  double worst_acc = 0.0;
  for (double k : {0.5, 1.0, 2.0}) {
    const Curvature curv(k);
    const auto acc = accelerations(embed_lagrangian({curv.radius(), 0.0, 0.3, 0.0}, curv, 1.3));
    for (const SpaceVector& a : acc) worst_acc = std::max({worst_acc, std::abs(a.x), std::abs(a.y), std::abs(a.z)});
  }
  if (!(worst_acc < 1e-12)) failures.push_back(fmt::format("equatorial acceleration {:.2e}", worst_acc));

  const PortraitData fig3 = preset_portrait("fig3", grid);
  const std::size_t fig3_valid = static_cast<std::size_t>(
      std::count_if(fig3.cells.begin(), fig3.cells.end(), [](const PortraitCell& c) { return c.valid; }));
  const std::size_t fig3_ok = count_class(fig3, OrbitClass::Periodic) + count_class(fig3, OrbitClass::Equilibrium);
  if (fig3_ok != fig3_valid) failures.push_back(fmt::format("fig3 {}/{} periodic", fig3_ok, fig3_valid));

  for (std::string_view name : {"fig2a", "fig4a"}) {
    const std::size_t periodic = count_class(preset_portrait(name, grid), OrbitClass::Periodic);
    if (periodic != 0) failures.push_back(fmt::format("{} has {} periodic cells", name, periodic));
  }

  const PortraitData fig2b = preset_portrait("fig2b", grid);
  const double r1 = fig2b.fixed_points.at(0).r;
  const double r2 = fig2b.fixed_points.at(1).r;
  const double spacing = (fig2b.r_range[1] - fig2b.r_range[0]) / static_cast<double>(grid - 1);
  bool periodic_near_r1 = false;
  bool unbounded_beyond_r2 = false;
  for (const PortraitCell& c : fig2b.cells) {
    if (!c.valid) continue;
    if (c.cls == OrbitClass::Periodic && std::abs(c.r0 - r1) <= spacing) periodic_near_r1 = true;
    if (c.cls == OrbitClass::Unbounded && c.r0 > r2) unbounded_beyond_r2 = true;
  }
  if (!periodic_near_r1) failures.push_back("fig2b has no periodic cell next to r1");
  if (!unbounded_beyond_r2) failures.push_back("fig2b has no unbounded cell beyond r2");

  double worst_excess = -std::numeric_limits<double>::infinity();
  for (std::string_view name : {"fig1a", "fig1b"}) {
    const PortraitData d = preset_portrait(name, grid);
    for (const PortraitCell& c : d.cells) {
      if (c.valid) worst_excess = std::max(worst_excess, c.max_r - d.curv.radius());
    }
  }
  if (!(worst_excess <= 1e-8)) failures.push_back(fmt::format("equator crossed by {:.2e}", worst_excess));

  std::string detail = fmt::format("{}x{} grids; equatorial |a| {:.1e}; fig3 {}/{} periodic; max r - equator {:.2e}",
                                   grid, grid, worst_acc, fig3_ok, fig3_valid, worst_excess);
  for (const std::string& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

// --- 7 -------------------------------------------------------------------------

Outcome check_unequal_mass(const VerifyOptions& opts) {
  Rng rng(opts.seed + 7);
  const int n = trials_or(opts, 100);
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_equal = 0.0;
  for (int i = 0; i < n; ++i) {
    const Curvature curv(random_sign(rng) * log_uniform(rng, 0.3, 3.0));
    const double scale = curv.positive() ? curv.radius() : 1.0;
    const double r = uniform(rng, 0.2, 0.9) * scale;
    const double r_dot = uniform(rng, -0.5, 0.5);
    const double w = uniform(rng, -2.0, 2.0);
    const double s = 12.0 - 9.0 * curv.kappa() * r * r;
    const double twist = 4.0 * std::sqrt(3.0) / (r * r * s * std::sqrt(s));

    // Redraw until some pair differs by at least 1e-3; a third of the draws
    // share m1 = m2.
    std::array<double, 3> masses{};
    double dm_min = 0.0;
    for (;;) {
      for (double& mi : masses) mi = log_uniform(rng, 0.1, 3.0);
      if (uniform(rng, 0.0, 1.0) < 0.3) masses[1] = masses[0];
      dm_min = std::numeric_limits<double>::infinity();
      double dm_max = 0.0;
      for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = a + 1; b < 3; ++b) {
          const double d = std::abs(masses[a] - masses[b]);
          dm_max = std::max(dm_max, d);
          if (d > 0.0) dm_min = std::min(dm_min, d);
        }
      }
      if (dm_max >= 1e-3) break;
    }

    // The angular terms share r w'' + 2 r' w, so the adversarial w'' puts that
    // term midway between the extreme twists.
    const std::array<double, 3> d{masses[0] - masses[1], masses[1] - masses[2], masses[2] - masses[0]};
    const double mid = 0.5 * twist * (*std::max_element(d.begin(), d.end()) + *std::min_element(d.begin(), d.end()));
    const std::array<double, 3> w_ddots{(mid - 2.0 * r_dot * w) / r, -2.0 * r_dot * w / r, uniform(rng, -3.0, 3.0)};
    for (double w_ddot : w_ddots) {
      const auto res = unequal_mass_residuals(r, r_dot, 0.0, w, w_ddot, curv, masses[0], masses[1], masses[2]);
      const double largest = std::max({std::abs(res[3]), std::abs(res[4]), std::abs(res[5])});
      worst_margin = std::min(worst_margin, largest - (twist * dm_min - 1e-12));
    }

    const double m = masses[0];
    const double r_ddot = lagrangian_rhs(r, r_dot, w * r * r, curv, m).nu_dot;
    const auto eq = unequal_mass_residuals(r, r_dot, r_ddot, w, -2.0 * r_dot * w / r, curv, m, m, m);
    for (double v : eq) worst_equal = std::max(worst_equal, std::abs(v));
  }
  const bool ok = worst_margin >= 0.0 && worst_equal < 1e-12;
  return {ok, fmt::format("{} mass triples; smallest margin over the bound {:.3e}; equal-mass residual {:.2e}", n,
                          worst_margin, worst_equal)};
}

// --- 8 -------------------------------------------------------------------------

Outcome check_hyperbolic(const VerifyOptions& opts) {
  Rng rng(opts.seed + 8);
  const int n = trials_or(opts, 20);
  double worst_residual = 0.0;
  double worst_drift = 0.0;
  double weakest_violation = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const Curvature curv(-log_uniform(rng, 0.3, 2.0));
    const double rho = uniform(rng, 1.2, 3.0) * curv.radius();
    const double m = log_uniform(rng, 0.2, 2.0);
    const double a = hyperbolic_re_rate(rho, curv, m);
    const HyperbolicState hs{rho, 0.0, uniform(rng, -0.5, 0.5), a};
    const SystemState state = embed_hyperbolic(hs, curv, m);

    const auto full = accelerations(state);
    const auto ansatz = hyperbolic_ansatz_accelerations(hs, 0.0, 0.0, curv);
    for (std::size_t b = 0; b < kBodyCount; ++b) {
      const SpaceVector diff = full[b] - ansatz[b];
      worst_residual = std::max({worst_residual, std::abs(diff.x), std::abs(diff.y), std::abs(diff.z)});
    }

    const TrajectorySeries series = integrate(state, 5.0);
    if (series.reason != TerminationReason::Completed) return fail("hyperbolic relative equilibrium did not complete");
    for (const TrajectorySample& s : series.samples) {
      worst_drift = std::max(worst_drift, std::abs(hyperbolic_size(s.state) - rho));
    }

    // Same size and rate with rho' != 0: body 1 pins omega'' from the full
    // equations and E = 0 fixes rho'', leaving F = 2 rho' omega'.
    const HyperbolicState moving{rho, 0.05 * rho, 0.0, a};
    const auto acc = accelerations(embed_hyperbolic(moving, curv, m));
    const double omega_ddot = acc[0].y / curv.radius();
    const ResidualPair base = hyperbolic_residuals(rho, moving.rho_dot, 0.0, a, omega_ddot, curv, m);
    const double rho_ddot = -base.first;
    const ResidualPair ef = hyperbolic_residuals(rho, moving.rho_dot, rho_ddot, a, omega_ddot, curv, m);
    weakest_violation = std::min(weakest_violation, std::abs(ef.second) / (2.0 * moving.rho_dot * a));
  }
  const bool ok = worst_residual < 1e-9 && worst_drift < 1e-6 && weakest_violation > 0.5;
  return {ok, fmt::format("{} trials; full-equation residual {:.2e}; rho drift {:.2e}; perturbed |F| / (2 rho' w) "
                          ">= {:.3f}",
                          n, worst_residual, worst_drift, weakest_violation)};
}

// --- 9 -------------------------------------------------------------------------

Outcome check_period(const VerifyOptions&) {
  double worst = 0.0;
  int centers = 0;
  std::vector<std::string> failures;
  for (const Preset& p : presets()) {
    const Curvature curv(p.kappa);
    for (const FixedPointRecord& fp : fixed_points(p.kind, curv, p.c, p.m)) {
      if (fp.stability != Stability::Center) continue;
      const double predicted = 2.0 * std::numbers::pi / std::abs(fp.eigenvalues[0].imag());
      for (const auto& [dr, dnu] : {std::pair{1e-3, 0.0}, std::pair{-1e-3, 0.0}, std::pair{0.0, 1e-3}}) {
        ++centers;
        const ReducedState rs{fp.r + dr, dnu, 0.0, p.c};
        const ReducedSeries series = integrate_reduced(p.kind, rs, curv, p.m, 6.0 * predicted);
        const auto period = detect_period(series, 1e-6);
        if (!period) {
          failures.push_back(fmt::format("{} r0={:.6f}: no period", p.name, fp.r));
          continue;
        }
        const double rel = std::abs(*period - predicted) / predicted;
        worst = std::max(worst, rel);
        if (!(rel < 0.05)) failures.push_back(fmt::format("{}: {:.4f} vs {:.4f}", p.name, *period, predicted));
      }
    }
  }
  std::string detail = fmt::format("{} starts around preset centers; worst relative period error {:.2e}", centers, worst);
  for (const std::string& f : failures) detail += "; " + f;
  return {failures.empty() && centers > 0, detail};
}

struct NamedCheck {
  std::string_view name;
  std::function<Outcome(const VerifyOptions&)> run;
};

const std::vector<NamedCheck>& registry() {
  static const std::vector<NamedCheck> checks = {
      {"fixed-points", check_fixed_points},   {"resultant", check_resultant},
      {"counts", check_counts},               {"conservation", check_conservation},
      {"reduced-vs-full", check_reduced_vs_full}, {"taxonomy", check_taxonomy},
      {"unequal-mass", check_unequal_mass},   {"hyperbolic", check_hyperbolic},
      {"period", check_period},
  };
  return checks;
}

}  // namespace

const std::vector<std::string_view>& check_names() {
  static const std::vector<std::string_view> names = [] {
    std::vector<std::string_view> out;
    for (const NamedCheck& c : registry()) out.push_back(c.name);
    return out;
  }();
  return names;
}

CheckResult run_check(std::string_view name, const VerifyOptions& opts) {
  for (const NamedCheck& c : registry()) {
    if (c.name != name) continue;
    const auto start = std::chrono::steady_clock::now();
    CheckResult result;
    result.name = std::string(name);
    try {
      const Outcome o = c.run(opts);
      result.passed = o.passed;
      result.detail = o.detail;
    } catch (const std::exception& e) {
      result.passed = false;
      result.detail = fmt::format("error: {}", e.what());
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  }
  throw DomainError(fmt::format("unknown check '{}'", name));
}

std::vector<CheckResult> run_all(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  for (std::string_view name : check_names()) out.push_back(run_check(name, opts));
  return out;
}

SystemState random_system_state(std::mt19937_64& rng, const Curvature& curv, double min_gap,
                                std::pair<double, double> mass_range, double max_speed) {
  const double radius = curv.radius();
  for (;;) {
    SystemState s;
    s.curv = curv;
    for (Body& b : s.bodies) {
      b.mass = uniform(rng, mass_range.first, mass_range.second);
      const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      if (curv.positive()) {
        const double theta = uniform(rng, 0.2, 1.2);
        b.q = {radius * std::sin(theta) * std::cos(phi), radius * std::sin(theta) * std::sin(phi),
               radius * std::cos(theta)};
      } else {
        const double rho = uniform(rng, 0.0, 1.5) * radius;
        b.q = project_position({rho * std::cos(phi), rho * std::sin(phi), std::hypot(rho, radius)}, curv);
      }
      const SpaceVector raw{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
      SpaceVector v = project_velocity(b.q, raw, curv);
      const double speed = std::sqrt(std::abs(signed_dot(v, v, curv.signature())));
      if (speed > 0.0) v = (uniform(rng, 0.0, max_speed) / speed) * v;
      b.v = v;
    }
    if (min_pair_gap(s) > min_gap) return s;
  }
}

}  // namespace curved3b
