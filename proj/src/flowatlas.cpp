#include "curved3b/flowatlas.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "curved3b/errors.hpp"

namespace curved3b {

namespace {

constexpr OrbitClass kAllClasses[] = {
    OrbitClass::Equilibrium,       OrbitClass::RelativeEquilibrium, OrbitClass::Homothetic,
    OrbitClass::Periodic,          OrbitClass::HomoclinicCandidate, OrbitClass::Unbounded,
    OrbitClass::CollisionApproach, OrbitClass::EquatorAsymptotic,   OrbitClass::Unresolved,
};

struct Crossing {
  double t = 0.0;
  double r = 0.0;
};

double hermite(double s, double h, double y0, double d0, double y1, double d1) {
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
}

std::vector<Crossing> upward_crossings(const ReducedSeries& series) {
  std::vector<Crossing> out;
  const auto& s = series.samples;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const ReducedSample& a = s[i];
    const ReducedSample& b = s[i + 1];
    if (!(a.nu < 0.0 && b.nu >= 0.0)) continue;
    const double h = b.t - a.t;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (hermite(mid, h, a.nu, a.nu_dot, b.nu, b.nu_dot) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double sc = 0.5 * (lo + hi);
    out.push_back({a.t + sc * h, hermite(sc, h, a.r, a.nu, b.r, b.nu)});
  }
  return out;
}

bool is_equator_end(TerminationReason reason, double r, const Curvature& curv) {
  return reason == TerminationReason::BoundaryApproach && curv.positive() && curv.kappa() * r * r >= 0.5;
}

bool is_collision_end(TerminationReason reason, double r, const Curvature& curv) {
  return reason == TerminationReason::BoundaryApproach && !is_equator_end(reason, r, curv);
}

// Time spent within `distance` of (r_s, 0) on samples with sign(t) == side.
double dwell_time(const ReducedSeries& series, double r_s, double distance, int side) {
  double total = 0.0;
  const auto& s = series.samples;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const ReducedSample& a = s[i];
    const ReducedSample& b = s[i + 1];
    if ((side > 0 && a.t < 0.0) || (side < 0 && b.t > 0.0)) continue;
    const bool near_a = std::hypot(a.r - r_s, a.nu) <= distance;
    const bool near_b = std::hypot(b.r - r_s, b.nu) <= distance;
    if (near_a && near_b) total += b.t - a.t;
  }
  return total;
}

bool stationary(const ReducedSeries& series, double tol) {
  if (series.reason != TerminationReason::Completed) return false;
  if (series.start_reason != TerminationReason::Completed && series.start_reason != TerminationReason::Initial) {
    return false;
  }
  const ReducedSample* origin = &series.samples.front();
  for (const ReducedSample& s : series.samples) {
    if (s.t == 0.0) origin = &s;
  }
  const double scale = tol * std::max(1.0, origin->r);
  return std::all_of(series.samples.begin(), series.samples.end(), [&](const ReducedSample& s) {
    return std::abs(s.r - origin->r) <= scale && std::abs(s.nu) <= scale;
  });
}

bool domain_valid(ReducedKind kind, double r0, const Curvature& curv) {
  (void)kind;
  if (!(r0 > 0.0) || !std::isfinite(r0)) return false;
  if (curv.positive() && !(curv.kappa() * r0 * r0 < 1.0)) return false;
  return true;
}

}  // namespace

std::string_view to_string(OrbitClass cls) {
  switch (cls) {
    case OrbitClass::Equilibrium:
      return "EQUILIBRIUM";
    case OrbitClass::RelativeEquilibrium:
      return "RELATIVE_EQUILIBRIUM";
    case OrbitClass::Homothetic:
      return "HOMOTHETIC";
    case OrbitClass::Periodic:
      return "PERIODIC";
    case OrbitClass::HomoclinicCandidate:
      return "HOMOCLINIC_CANDIDATE";
    case OrbitClass::Unbounded:
      return "UNBOUNDED";
    case OrbitClass::CollisionApproach:
      return "COLLISION_APPROACH";
    case OrbitClass::EquatorAsymptotic:
      return "EQUATOR_ASYMPTOTIC";
    case OrbitClass::Unresolved:
      return "UNRESOLVED";
  }
  return "UNRESOLVED";
}

OrbitClass orbit_class_from_string(std::string_view name) {
  for (OrbitClass cls : kAllClasses) {
    if (to_string(cls) == name) return cls;
  }
  throw DomainError(fmt::format("unknown orbit class '{}'", name));
}

std::optional<double> detect_period(const ReducedSeries& series, double tol) {
  const std::vector<Crossing> crossings = upward_crossings(series);
  if (crossings.size() < 2) return std::nullopt;
  for (std::size_t i = 0; i + 1 < crossings.size(); ++i) {
    const double scale = tol * std::max(1.0, std::abs(crossings[i].r));
    if (!(std::abs(crossings[i + 1].r - crossings[i].r) < scale)) return std::nullopt;
  }
  const double period = (crossings.back().t - crossings.front().t) / static_cast<double>(crossings.size() - 1);
  if (!(period > 0.0)) return std::nullopt;
  return period;
}

OrbitClass classify_trajectory(const ReducedSeries& series, const std::vector<FixedPointRecord>& fps,
                               const ClassifyOptions& opts) {
  if (series.samples.empty()) throw DomainError("cannot classify an empty series");
  const Curvature& curv = series.curv;

  if (stationary(series, opts.tol)) {
    if (series.c == 0.0) return OrbitClass::Equilibrium;
    const double r0 = series.samples.front().r;
    const bool listed = std::any_of(fps.begin(), fps.end(), [&](const FixedPointRecord& fp) {
      return std::abs(fp.r - r0) <= opts.tol * std::max(1.0, fp.r);
    });
    return listed ? OrbitClass::Equilibrium : OrbitClass::RelativeEquilibrium;
  }
  if (series.c == 0.0) return OrbitClass::Homothetic;
  if (detect_period(series, opts.tol)) return OrbitClass::Periodic;

  const ReducedSample& first = series.samples.front();
  const ReducedSample& last = series.samples.back();
  if (is_equator_end(series.reason, last.r, curv) || is_equator_end(series.start_reason, first.r, curv)) {
    return OrbitClass::EquatorAsymptotic;
  }

  const double dwell = opts.dwell_fraction * opts.t_span;
  for (const FixedPointRecord& fp : fps) {
    if (fp.stability != Stability::Saddle) continue;
    if (dwell_time(series, fp.r, opts.saddle_distance, +1) >= dwell &&
        dwell_time(series, fp.r, opts.saddle_distance, -1) >= dwell) {
      return OrbitClass::HomoclinicCandidate;
    }
  }

  if (series.reason == TerminationReason::Escaped || series.start_reason == TerminationReason::Escaped) {
    return OrbitClass::Unbounded;
  }
  if (is_collision_end(series.reason, last.r, curv) || is_collision_end(series.start_reason, first.r, curv)) {
    return OrbitClass::CollisionApproach;
  }
  return OrbitClass::Unresolved;
}

double grid_value(const std::array<double, 2>& range, std::size_t n, std::size_t k) {
  if (n <= 1) return 0.5 * (range[0] + range[1]);
  return range[0] + (range[1] - range[0]) * static_cast<double>(k) / static_cast<double>(n - 1);
}

double default_escape_radius(const std::array<double, 2>& r_range) {
  return 50.0 * std::max(std::abs(r_range[0]), std::abs(r_range[1]));
}

PortraitData sweep(ReducedKind kind, const Curvature& curv, double c, double m, std::array<double, 2> r_range,
                   std::array<double, 2> nu_range, std::size_t nr, std::size_t nnu, double t_span,
                   const SweepOptions& opts) {
  if (nr == 0 || nnu == 0) throw DomainError("grid dimensions must be positive");
  if (!(t_span > 0.0)) throw DomainError("t_span must be positive");
  if (!(m > 0.0)) throw DomainError("mass must be positive");
  opts.ctrl.validate();

  PortraitData data;
  data.kind = kind;
  data.curv = curv;
  data.c = c;
  data.m = m;
  data.r_range = r_range;
  data.nu_range = nu_range;
  data.nr = nr;
  data.nnu = nnu;
  data.t_span = t_span;
  data.escape_radius = default_escape_radius(r_range);
  data.fixed_points = fixed_points(kind, curv, c, m);
  data.cells.resize(nr * nnu);

  ClassifyOptions copts = opts.classify;
  copts.t_span = t_span;

  auto run_cell = [&](std::size_t index) {
    PortraitCell& cell = data.cells[index];
    cell.r0 = grid_value(r_range, nr, index / nnu);
    cell.nu0 = grid_value(nu_range, nnu, index % nnu);
    if (!domain_valid(kind, cell.r0, curv)) return;
    try {
      const ReducedState rs{cell.r0, cell.nu0, 0.0, c};
      const ReducedSeries series =
          integrate_reduced_both_ways(kind, rs, curv, m, t_span, opts.ctrl, data.escape_radius);
      cell.valid = true;
      cell.min_r = cell.max_r = series.samples.front().r;
      for (const ReducedSample& s : series.samples) {
        cell.min_r = std::min(cell.min_r, s.r);
        cell.max_r = std::max(cell.max_r, s.r);
      }
      cell.cls = classify_trajectory(series, data.fixed_points, copts);
      if (cell.cls == OrbitClass::Periodic) cell.period = detect_period(series, copts.tol);
    } catch (const StepUnderflow&) {
      cell.valid = true;
      cell.cls = OrbitClass::Unresolved;
    } catch (const DomainError&) {
      cell.valid = false;
    } catch (const SingularConfiguration&) {
      cell.valid = false;
    }
  };

  const std::size_t total = data.cells.size();
  unsigned workers = opts.threads != 0 ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) run_cell(i);
    return data;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) run_cell(i);
    });
  }
  for (std::thread& t : pool) t.join();
  return data;
}

}  // namespace curved3b
