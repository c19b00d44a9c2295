#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "curved3b/fixedpoints.hpp"
#include "curved3b/homographic.hpp"

namespace curved3b {

enum class OrbitClass {
  Equilibrium,
  RelativeEquilibrium,
  Homothetic,
  Periodic,
  HomoclinicCandidate,
  Unbounded,
  CollisionApproach,
  EquatorAsymptotic,
  Unresolved,  ///< none of the above could be decided within t_span
};

std::string_view to_string(OrbitClass cls);
OrbitClass orbit_class_from_string(std::string_view name);

struct ClassifyOptions {
  /// Closing tolerance of the return map and stationarity tolerance, relative
  /// to max(1, r).
  double tol = 1e-6;
  /// Half-length of the merged series; sets the homoclinic dwell threshold.
  double t_span = 100.0;
  /// Distance in (r, nu) that counts as sitting on a saddle.
  double saddle_distance = 1e-4;
  /// Fraction of t_span each leg must spend near a saddle.
  double dwell_fraction = 0.1;
};

OrbitClass classify_trajectory(const ReducedSeries& series, const std::vector<FixedPointRecord>& fps,
                               const ClassifyOptions& opts = {});

/// Mean time between successive upward nu = 0 crossings, provided every
/// successive pair of crossings has |delta r| < tol max(1, r). Needs at least
/// two crossings.
std::optional<double> detect_period(const ReducedSeries& series, double tol);

struct PortraitCell {
  double r0 = 0.0;
  double nu0 = 0.0;
  bool valid = false;
  OrbitClass cls = OrbitClass::Unresolved;
  double min_r = 0.0;
  double max_r = 0.0;
  std::optional<double> period;
};

struct PortraitData {
  ReducedKind kind = ReducedKind::Lagrangian;
  Curvature curv{1.0};
  double c = 0.0;
  double m = 1.0;
  std::array<double, 2> r_range{};
  std::array<double, 2> nu_range{};
  std::size_t nr = 0;
  std::size_t nnu = 0;
  double t_span = 0.0;
  double escape_radius = 0.0;
  std::vector<FixedPointRecord> fixed_points;
  /// Row-major: cell (i, j) with r index i and nu index j sits at i * nnu + j.
  std::vector<PortraitCell> cells;

  const PortraitCell& at(std::size_t i, std::size_t j) const { return cells[i * nnu + j]; }
};

/// Grid coordinate k of n points over [lo, hi]; a single point sits at the
/// midpoint.
double grid_value(const std::array<double, 2>& range, std::size_t n, std::size_t k);

struct SweepOptions {
  ClassifyOptions classify;
  StepControl ctrl;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

/// Integrates every grid cell forward and backward over t_span and classifies
/// it. Cells outside the regime's domain are left invalid. Output does not
/// depend on the thread count.
PortraitData sweep(ReducedKind kind, const Curvature& curv, double c, double m, std::array<double, 2> r_range,
                   std::array<double, 2> nu_range, std::size_t nr, std::size_t nnu, double t_span,
                   const SweepOptions& opts = {});

/// Escape radius used by sweep: 50 max(r_range).
double default_escape_radius(const std::array<double, 2>& r_range);

}  // namespace curved3b
