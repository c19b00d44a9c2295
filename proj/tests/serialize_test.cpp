#include <doctest.h>

#include <sstream>

#include "curved3b/errors.hpp"
#include "curved3b/serialize.hpp"
#include "curved3b/verify.hpp"
#include "support.hpp"

using namespace curved3b;
using nlohmann::json;

namespace {

const json kConfig = {{"command", "test"}, {"seed", 7}, {"note", "x,y \"quoted\""}};

void check_same(const TrajectorySeries& a, const TrajectorySeries& b) {
  REQUIRE(a.samples.size() == b.samples.size());
  CHECK(a.reason == b.reason);
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    const TrajectorySample& x = a.samples[k];
    const TrajectorySample& y = b.samples[k];
    CHECK(x.state.t == y.state.t);
    CHECK(x.state.curv.kappa() == y.state.curv.kappa());
    for (std::size_t i = 0; i < kBodyCount; ++i) {
      CHECK(x.state.bodies[i].mass == y.state.bodies[i].mass);
      CHECK(x.state.bodies[i].q == y.state.bodies[i].q);
      CHECK(x.state.bodies[i].v == y.state.bodies[i].v);
    }
    CHECK(x.ledger.energy == y.ledger.energy);
    CHECK(x.ledger.angular_momentum == y.ledger.angular_momentum);
  }
}

void check_same(const ReducedSeries& a, const ReducedSeries& b) {
  REQUIRE(a.samples.size() == b.samples.size());
  CHECK(a.kind == b.kind);
  CHECK(a.curv.kappa() == b.curv.kappa());
  CHECK(a.c == b.c);
  CHECK(a.m == b.m);
  CHECK(a.reason == b.reason);
  CHECK(a.start_reason == b.start_reason);
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    CHECK(a.samples[k].t == b.samples[k].t);
    CHECK(a.samples[k].r == b.samples[k].r);
    CHECK(a.samples[k].nu == b.samples[k].nu);
    CHECK(a.samples[k].omega == b.samples[k].omega);
  }
}

TrajectorySeries sample_trajectory() {
  std::mt19937_64 rng(71);
  return integrate(random_system_state(rng, Curvature(-0.7), 0.05, {0.1, 0.5}, 1.0), 0.5);
}

ReducedSeries sample_reduced() {
  return integrate_reduced_both_ways(ReducedKind::Eulerian, {0.6, 0.1, 0.0, 2.0}, Curvature(1.0), 2.0, 3.0);
}

}  // namespace

TEST_SUITE("serialize") {
  TEST_CASE("trajectory CSV round trip") {
    const TrajectorySeries series = sample_trajectory();
    std::stringstream buf;
    write_trajectory_csv(buf, series, kConfig);
    const LoadedTrajectory back = read_trajectory_csv(buf);
    check_same(series, back.series);
    CHECK(back.config == kConfig);
  }

  TEST_CASE("trajectory JSON lines round trip") {
    const TrajectorySeries series = sample_trajectory();
    std::stringstream buf;
    write_trajectory_jsonl(buf, series, kConfig);
    const LoadedTrajectory back = read_trajectory_jsonl(buf);
    check_same(series, back.series);
    CHECK(back.config == kConfig);
  }

  TEST_CASE("reduced CSV and JSON lines round trip") {
    const ReducedSeries series = sample_reduced();
    std::stringstream csv;
    write_reduced_csv(csv, series, kConfig);
    const LoadedReduced a = read_reduced_csv(csv);
    check_same(series, a.series);
    CHECK(a.config == kConfig);
    // nu_dot is recomputed from the field
    for (std::size_t k = 0; k < series.samples.size(); ++k) {
      CHECK(a.series.samples[k].nu_dot == doctest::Approx(series.samples[k].nu_dot).epsilon(1e-12));
    }

    std::stringstream jl;
    write_reduced_jsonl(jl, series, kConfig);
    const LoadedReduced b = read_reduced_jsonl(jl);
    check_same(series, b.series);
    CHECK(b.config == kConfig);
  }

  TEST_CASE("fixed point records round trip") {
    for (const FixedPointRecord& rec : lagrangian_fixed_points(Curvature(-0.3), 0.23, 0.12)) {
      const FixedPointRecord back = fixed_point_from_json(json::parse(to_json(rec).dump()));
      CHECK(back.r == rec.r);
      CHECK(back.kind == rec.kind);
      CHECK(back.stability == rec.stability);
      CHECK(back.eigenvalues == rec.eigenvalues);
    }
    const FixedPointRecord edge = lagrangian_fixed_points(Curvature(1.0), 1.0, 4.0).back();
    CHECK(fixed_point_from_json(to_json(edge)).kind == FixedPointKind::EquatorBoundary);
  }

  TEST_CASE("portrait JSON round trip and flat CSV") {
    SweepOptions opts;
    opts.threads = 2;
    const PortraitData data =
        sweep(ReducedKind::Lagrangian, Curvature(-0.3), 0.23, 0.12, {0.8, 2.5}, {-0.05, 0.05}, 4, 3, 100.0, opts);
    const PortraitData back = portrait_from_json(json::parse(portrait_to_json(data, kConfig).dump()));
    CHECK(back.kind == data.kind);
    CHECK(back.curv.kappa() == data.curv.kappa());
    CHECK(back.nr == data.nr);
    CHECK(back.nnu == data.nnu);
    CHECK(back.r_range == data.r_range);
    CHECK(back.nu_range == data.nu_range);
    CHECK(back.escape_radius == data.escape_radius);
    REQUIRE(back.fixed_points.size() == data.fixed_points.size());
    REQUIRE(back.cells.size() == data.cells.size());
    for (std::size_t k = 0; k < data.cells.size(); ++k) {
      CHECK(back.cells[k].r0 == data.cells[k].r0);
      CHECK(back.cells[k].nu0 == data.cells[k].nu0);
      CHECK(back.cells[k].valid == data.cells[k].valid);
      CHECK(back.cells[k].cls == data.cells[k].cls);
      CHECK(back.cells[k].min_r == data.cells[k].min_r);
      CHECK(back.cells[k].max_r == data.cells[k].max_r);
      CHECK(back.cells[k].period == data.cells[k].period);
    }

    std::stringstream csv;
    write_portrait_csv(csv, data, kConfig);
    std::string line;
    std::size_t rows = 0;
    bool header = false;
    while (std::getline(csv, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!header) {
        CHECK(line == "r0,nu0,class,min_r,max_r,period");
        header = true;
        continue;
      }
      ++rows;
    }
    CHECK(rows == data.cells.size());
  }

  TEST_CASE("malformed input is rejected") {
    std::stringstream empty;
    CHECK_THROWS(read_trajectory_csv(empty));
    std::stringstream junk("{\"type\": \"meta\"}\n");
    CHECK_THROWS(read_reduced_jsonl(junk));
  }
}
