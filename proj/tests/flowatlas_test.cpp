#include <doctest.h>

#include <deque>
#include <numbers>

#include "curved3b/errors.hpp"
#include "curved3b/flowatlas.hpp"
#include "curved3b/presets.hpp"
#include "support.hpp"

using namespace curved3b;

namespace {

OrbitClass classify_start(ReducedKind kind, const ReducedState& rs, const Curvature& curv, double m,
                          double t_span, double escape = 100.0) {
  const ReducedSeries series = integrate_reduced_both_ways(kind, rs, curv, m, t_span, {}, escape);
  ClassifyOptions opts;
  opts.t_span = t_span;
  return classify_trajectory(series, fixed_points(kind, curv, rs.c, m), opts);
}

PortraitData preset_sweep(std::string_view name, std::size_t nr, std::size_t nnu, unsigned threads = 0) {
  const Preset& p = find_preset(name);
  SweepOptions opts;
  opts.threads = threads;
  return sweep(p.kind, Curvature(p.kappa), p.c, p.m, p.r_range, p.nu_range, nr, nnu, p.t_span, opts);
}

const Curvature kFig2(-0.3);

}  // namespace

TEST_SUITE("flowatlas") {
  TEST_CASE("classification examples") {
    const auto fps = eulerian_fixed_points(Curvature(1.0), 2.0, 2.0);
    REQUIRE(fps.size() == 1);
    CHECK(classify_start(ReducedKind::Eulerian, {fps[0].r, 0.0, 0.0, 2.0}, Curvature(1.0), 2.0, 20.0) ==
          OrbitClass::Equilibrium);
    CHECK(classify_start(ReducedKind::Eulerian, {fps[0].r + 0.05, 0.0, 0.0, 2.0}, Curvature(1.0), 2.0, 50.0) ==
          OrbitClass::Periodic);
    CHECK(classify_start(ReducedKind::Lagrangian, {0.5, 0.0, 0.0, 1.0}, Curvature(1.0), 0.24, 50.0) ==
          OrbitClass::EquatorAsymptotic);
    CHECK(classify_start(ReducedKind::Lagrangian, {0.5, 0.0, 0.0, 0.0}, Curvature(1.0), 1.0, 10.0) ==
          OrbitClass::Homothetic);
    CHECK(classify_start(ReducedKind::Lagrangian, {1.0, 0.1, 0.0, 1.0 / 3.0}, Curvature(-2.0), 0.5, 100.0) ==
          OrbitClass::Unbounded);
  }

  TEST_CASE("relative equilibria off the fixed-point list") {
    const auto fps = eulerian_fixed_points(Curvature(1.0), 2.0, 2.0);
    const ReducedSeries series =
        integrate_reduced_both_ways(ReducedKind::Eulerian, {fps[0].r, 0.0, 0.0, 2.0}, Curvature(1.0), 2.0, 10.0);
    CHECK(classify_trajectory(series, fps) == OrbitClass::Equilibrium);
    CHECK(classify_trajectory(series, {}) == OrbitClass::RelativeEquilibrium);
    CHECK_THROWS_AS(classify_trajectory(ReducedSeries{}, fps), DomainError);
  }

  TEST_CASE("period detection") {
    const double r1 = lagrangian_fixed_points(kFig2, 0.23, 0.12)[0].r;
    const FixedPointRecord center = classify(ReducedKind::Lagrangian, r1, kFig2, 0.23, 0.12);
    const double linear = 2.0 * std::numbers::pi / std::abs(center.eigenvalues[0].imag());

    const ReducedState start{r1 + 1e-3, 0.0, 0.0, 0.23};
    const ReducedSeries coarse = integrate_reduced(ReducedKind::Lagrangian, start, kFig2, 0.12, 5.0 * linear);
    StepControl fine;
    fine.relative_tolerance = 1e-12;
    fine.absolute_tolerance = 1e-14;
    fine.max_step = 0.05;
    const ReducedSeries refined = integrate_reduced(ReducedKind::Lagrangian, start, kFig2, 0.12, 5.0 * linear, fine);

    const auto p1 = detect_period(coarse, 1e-6);
    const auto p2 = detect_period(refined, 1e-6);
    REQUIRE(p1);
    REQUIRE(p2);
    CHECK(testing::relative_error(*p1, *p2) < 1e-4);
    CHECK(testing::relative_error(*p1, linear) < 0.05);

    const ReducedSeries out =
        integrate_reduced(ReducedKind::Lagrangian, {1.0, 0.1, 0.0, 1.0 / 3.0}, Curvature(-2.0), 0.5, 100.0, {}, 100.0);
    CHECK_FALSE(detect_period(out, 1e-6));
  }

  TEST_CASE("grid coordinates") {
    CHECK(grid_value({0.0, 1.0}, 1, 0) == 0.5);
    CHECK(grid_value({0.0, 1.0}, 5, 0) == 0.0);
    CHECK(grid_value({0.0, 1.0}, 5, 4) == 1.0);
    CHECK(grid_value({-1.0, 1.0}, 3, 1) == 0.0);
    CHECK(default_escape_radius({0.5, 3.0}) == 150.0);
  }

  TEST_CASE("presets") {
    CHECK(presets().size() == 7);
    const Preset& fig3 = find_preset("fig3");
    CHECK(fig3.kind == ReducedKind::Eulerian);
    CHECK(fig3.kappa == 1.0);
    CHECK_THROWS_AS(find_preset("fig9"), DomainError);
  }

  TEST_CASE("portraits without fixed points have no periodic cells") {
    const PortraitData data = preset_sweep("fig2a", 9, 9);
    int valid = 0;
    for (const PortraitCell& cell : data.cells) {
      if (!cell.valid) continue;
      ++valid;
      CHECK((cell.cls == OrbitClass::Unbounded || cell.cls == OrbitClass::CollisionApproach));
    }
    CHECK(valid > 0);
  }

  TEST_CASE("Eulerian sphere portrait is periodic") {
    const PortraitData data = preset_sweep("fig3", 7, 7);
    for (const PortraitCell& cell : data.cells) {
      if (cell.valid) CHECK(cell.cls == OrbitClass::Periodic);
      if (cell.valid) CHECK(cell.period.has_value());
    }
  }

  TEST_CASE("sweeps are reflection symmetric and thread independent") {
    const PortraitData one = preset_sweep("fig2b", 9, 11, 1);
    const PortraitData many = preset_sweep("fig2b", 9, 11, 4);
    REQUIRE(one.cells.size() == many.cells.size());
    for (std::size_t k = 0; k < one.cells.size(); ++k) {
      CHECK(one.cells[k].cls == many.cells[k].cls);
      CHECK(one.cells[k].max_r == many.cells[k].max_r);
      CHECK(one.cells[k].period == many.cells[k].period);
    }
    for (std::size_t i = 0; i < one.nr; ++i) {
      for (std::size_t j = 0; j < one.nnu; ++j) CHECK(one.at(i, j).cls == one.at(i, one.nnu - 1 - j).cls);
    }
  }

  TEST_CASE("periodic cells form one region around the center") {
    const Preset& p = find_preset("fig2b");
    SweepOptions opts;
    const PortraitData data = sweep(p.kind, Curvature(p.kappa), p.c, p.m, {0.8, 1.6}, {-0.04, 0.04}, 17, 17,
                                    p.t_span, opts);
    bool periodic_exists = false;
    bool unbounded_exists = false;
    for (const PortraitCell& cell : data.cells) {
      periodic_exists |= cell.cls == OrbitClass::Periodic;
      unbounded_exists |= cell.cls == OrbitClass::Unbounded;
    }
    CHECK(periodic_exists);
    (void)unbounded_exists;

    // Flood fill from the cell nearest the center.
    const double r1 = data.fixed_points.at(0).r;
    std::size_t ci = 0;
    for (std::size_t i = 0; i < data.nr; ++i) {
      if (std::abs(data.at(i, 0).r0 - r1) < std::abs(data.at(ci, 0).r0 - r1)) ci = i;
    }
    const std::size_t cj = data.nnu / 2;
    REQUIRE(data.at(ci, cj).cls == OrbitClass::Periodic);
    std::vector<bool> seen(data.cells.size(), false);
    std::deque<std::pair<std::size_t, std::size_t>> queue{{ci, cj}};
    seen[ci * data.nnu + cj] = true;
    while (!queue.empty()) {
      const auto [i, j] = queue.front();
      queue.pop_front();
      const std::pair<long, long> steps[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (const auto& [di, dj] : steps) {
        const long ni = static_cast<long>(i) + di;
        const long nj = static_cast<long>(j) + dj;
        if (ni < 0 || nj < 0 || ni >= static_cast<long>(data.nr) || nj >= static_cast<long>(data.nnu)) continue;
        const std::size_t idx = static_cast<std::size_t>(ni) * data.nnu + static_cast<std::size_t>(nj);
        if (seen[idx] || data.cells[idx].cls != OrbitClass::Periodic) continue;
        seen[idx] = true;
        queue.emplace_back(ni, nj);
      }
    }
    for (std::size_t k = 0; k < data.cells.size(); ++k) {
      if (data.cells[k].cls == OrbitClass::Periodic) CHECK(seen[k]);
    }
  }

  TEST_CASE("saddle side of the two fixed point portrait escapes") {
    const PortraitData data = preset_sweep("fig2b", 11, 5);
    bool periodic = false;
    bool unbounded_beyond = false;
    const double r2 = data.fixed_points.at(1).r;
    for (const PortraitCell& cell : data.cells) {
      periodic |= cell.cls == OrbitClass::Periodic;
      unbounded_beyond |= cell.cls == OrbitClass::Unbounded && cell.r0 > r2;
    }
    CHECK(periodic);
    CHECK(unbounded_beyond);
  }

  TEST_CASE("positive curvature Lagrangian cells stay below the equator") {
    for (std::string_view name : {"fig1a", "fig1b"}) {
      const PortraitData data = preset_sweep(name, 9, 9);
      for (const PortraitCell& cell : data.cells) {
        if (cell.valid) CHECK(cell.max_r <= data.curv.radius() + 1e-9);
      }
    }
  }
}
