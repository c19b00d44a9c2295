#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "curved3b/dynamics.hpp"
#include "curved3b/fixedpoints.hpp"
#include "curved3b/flowatlas.hpp"
#include "curved3b/homographic.hpp"

namespace curved3b {

// Every writer takes the run configuration as an opaque JSON object and embeds
// it verbatim. Numbers are written in shortest round-trip form, so reading a
// file back reproduces every double bit for bit.

// --- full trajectories ---------------------------------------------------------

/// Comment header (`# kappa=...`, `# config: {...}`), a column row, then one
/// row per sample: t, x1 y1 z1 vx1 vy1 vz1, ..., energy, cx, cy, cz.
void write_trajectory_csv(std::ostream& out, const TrajectorySeries& series, const nlohmann::json& config);

/// A meta line followed by one JSON object per sample.
void write_trajectory_jsonl(std::ostream& out, const TrajectorySeries& series, const nlohmann::json& config);

struct LoadedTrajectory {
  TrajectorySeries series;
  nlohmann::json config;
};
LoadedTrajectory read_trajectory_csv(std::istream& in);
LoadedTrajectory read_trajectory_jsonl(std::istream& in);

// --- reduced trajectories ------------------------------------------------------

/// Columns t, r, nu, omega.
void write_reduced_csv(std::ostream& out, const ReducedSeries& series, const nlohmann::json& config);
void write_reduced_jsonl(std::ostream& out, const ReducedSeries& series, const nlohmann::json& config);

struct LoadedReduced {
  ReducedSeries series;
  nlohmann::json config;
};
/// nu_dot is not stored; it is recomputed from the reduced field.
LoadedReduced read_reduced_csv(std::istream& in);
LoadedReduced read_reduced_jsonl(std::istream& in);

// --- fixed points and portraits -----------------------------------------------

nlohmann::json to_json(const FixedPointRecord& record);
FixedPointRecord fixed_point_from_json(const nlohmann::json& j);
nlohmann::json to_json(const std::vector<FixedPointRecord>& records);

nlohmann::json portrait_to_json(const PortraitData& data, const nlohmann::json& config);
PortraitData portrait_from_json(const nlohmann::json& j);

/// Flat table r0, nu0, class, min_r, max_r, period; invalid cells carry class
/// INVALID and an empty period means none was detected.
void write_portrait_csv(std::ostream& out, const PortraitData& data, const nlohmann::json& config);

}  // namespace curved3b
