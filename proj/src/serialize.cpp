#include "curved3b/serialize.hpp"

#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "curved3b/errors.hpp"

namespace curved3b {

namespace {

using nlohmann::json;

constexpr std::string_view kConfigPrefix = "# config: ";

double parse_double(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') throw DomainError(fmt::format("not a number: '{}'", text));
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  return out;
}

// Parses `# key=value key=value` into a map.
std::map<std::string, std::string> parse_meta(const std::string& line) {
  std::map<std::string, std::string> out;
  std::istringstream ss(line.substr(1));
  std::string token;
  while (ss >> token) {
    const auto eq = token.find('=');
    if (eq != std::string::npos) out[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return out;
}

const std::string& require(const std::map<std::string, std::string>& meta, const std::string& key) {
  const auto it = meta.find(key);
  if (it == meta.end()) throw DomainError(fmt::format("missing '{}' in header", key));
  return it->second;
}

struct CsvHeader {
  std::map<std::string, std::string> meta;
  json config = json::object();
  std::vector<std::string> columns;
};

CsvHeader read_csv_header(std::istream& in) {
  CsvHeader h;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(kConfigPrefix, 0) == 0) {
      h.config = json::parse(line.substr(kConfigPrefix.size()));
    } else if (!line.empty() && line[0] == '#') {
      for (auto& [k, v] : parse_meta(line)) h.meta[k] = v;
    } else {
      h.columns = split(line, ',');
      return h;
    }
  }
  throw DomainError("CSV ended before the column row");
}

json vec_json(const SpaceVector& v) { return json::array({v.x, v.y, v.z}); }

SpaceVector vec_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

json complex_json(const std::complex<double>& z) { return json::array({z.real(), z.imag()}); }

std::complex<double> complex_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

void fill_ledgers(TrajectorySeries& series, const std::vector<ConservedLedger>& ledgers) {
  for (std::size_t i = 0; i < series.samples.size(); ++i) series.samples[i].ledger = ledgers[i];
}

void recompute_nu_dot(ReducedSeries& series) {
  for (ReducedSample& s : series.samples) {
    try {
      s.nu_dot = reduced_rhs(series.kind, s.r, s.nu, series.c, series.curv, series.m).nu_dot;
    } catch (const Error&) {
      s.nu_dot = 0.0;
    }
  }
}

json reduced_meta(const ReducedSeries& series, const json& config) {
  return {{"type", "meta"},
          {"kind", to_string(series.kind)},
          {"kappa", series.curv.kappa()},
          {"c", series.c},
          {"m", series.m},
          {"reason", to_string(series.reason)},
          {"start_reason", to_string(series.start_reason)},
          {"config", config}};
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const TrajectorySeries& series, const json& config) {
  if (series.samples.empty()) throw DomainError("cannot write an empty trajectory");
  const SystemState& s0 = series.samples.front().state;
  out << fmt::format("# kappa={} m1={} m2={} m3={} reason={}\n", s0.curv.kappa(), s0.bodies[0].mass,
                     s0.bodies[1].mass, s0.bodies[2].mass, to_string(series.reason));
  out << kConfigPrefix << config.dump() << '\n';
  out << "t";
  for (int b = 1; b <= 3; ++b) out << fmt::format(",x{0},y{0},z{0},vx{0},vy{0},vz{0}", b);
  out << ",energy,cx,cy,cz\n";
  for (const TrajectorySample& s : series.samples) {
    std::string row = fmt::format("{}", s.state.t);
    for (const Body& b : s.state.bodies) {
      row += fmt::format(",{},{},{},{},{},{}", b.q.x, b.q.y, b.q.z, b.v.x, b.v.y, b.v.z);
    }
    const SpaceVector& c = s.ledger.angular_momentum;
    row += fmt::format(",{},{},{},{}\n", s.ledger.energy, c.x, c.y, c.z);
    out << row;
  }
}

LoadedTrajectory read_trajectory_csv(std::istream& in) {
  const CsvHeader h = read_csv_header(in);
  if (h.columns.size() != 23) throw DomainError("trajectory CSV must have 23 columns");
  LoadedTrajectory loaded;
  loaded.config = h.config;
  loaded.series.reason = termination_reason_from_string(require(h.meta, "reason"));
  SystemState proto;
  proto.curv = Curvature(parse_double(require(h.meta, "kappa")));
  for (int b = 0; b < 3; ++b) {
    proto.bodies[static_cast<std::size_t>(b)].mass = parse_double(require(h.meta, fmt::format("m{}", b + 1)));
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 23) throw DomainError(fmt::format("malformed trajectory row '{}'", line));
    TrajectorySample s{proto, {}};
    s.state.t = parse_double(f[0]);
    for (std::size_t b = 0; b < 3; ++b) {
      const std::size_t o = 1 + 6 * b;
      s.state.bodies[b].q = {parse_double(f[o]), parse_double(f[o + 1]), parse_double(f[o + 2])};
      s.state.bodies[b].v = {parse_double(f[o + 3]), parse_double(f[o + 4]), parse_double(f[o + 5])};
    }
    s.ledger.energy = parse_double(f[19]);
    s.ledger.angular_momentum = {parse_double(f[20]), parse_double(f[21]), parse_double(f[22])};
    loaded.series.samples.push_back(s);
  }
  return loaded;
}

void write_trajectory_jsonl(std::ostream& out, const TrajectorySeries& series, const json& config) {
  if (series.samples.empty()) throw DomainError("cannot write an empty trajectory");
  const SystemState& s0 = series.samples.front().state;
  json meta = {{"type", "meta"},
               {"kappa", s0.curv.kappa()},
               {"masses", {s0.bodies[0].mass, s0.bodies[1].mass, s0.bodies[2].mass}},
               {"reason", to_string(series.reason)},
               {"config", config}};
  out << meta.dump() << '\n';
  for (const TrajectorySample& s : series.samples) {
    json q = json::array();
    json v = json::array();
    for (const Body& b : s.state.bodies) {
      q.push_back(vec_json(b.q));
      v.push_back(vec_json(b.v));
    }
    json row = {{"t", s.state.t}, {"q", q}, {"v", v}, {"energy", s.ledger.energy},
                {"c", vec_json(s.ledger.angular_momentum)}};
    out << row.dump() << '\n';
  }
}

LoadedTrajectory read_trajectory_jsonl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty trajectory file");
  const json meta = json::parse(line);
  LoadedTrajectory loaded;
  loaded.config = meta.value("config", json::object());
  loaded.series.reason = termination_reason_from_string(meta.at("reason").get<std::string>());
  SystemState proto;
  proto.curv = Curvature(meta.at("kappa").get<double>());
  for (std::size_t b = 0; b < 3; ++b) proto.bodies[b].mass = meta.at("masses").at(b).get<double>();
  std::vector<ConservedLedger> ledgers;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json row = json::parse(line);
    TrajectorySample s{proto, {}};
    s.state.t = row.at("t").get<double>();
    for (std::size_t b = 0; b < 3; ++b) {
      s.state.bodies[b].q = vec_from(row.at("q").at(b));
      s.state.bodies[b].v = vec_from(row.at("v").at(b));
    }
    ledgers.push_back({row.at("energy").get<double>(), vec_from(row.at("c"))});
    loaded.series.samples.push_back(s);
  }
  fill_ledgers(loaded.series, ledgers);
  return loaded;
}

void write_reduced_csv(std::ostream& out, const ReducedSeries& series, const json& config) {
  out << fmt::format("# kind={} kappa={} c={} m={} reason={} start_reason={}\n", to_string(series.kind),
                     series.curv.kappa(), series.c, series.m, to_string(series.reason),
                     to_string(series.start_reason));
  out << kConfigPrefix << config.dump() << '\n';
  out << "t,r,nu,omega\n";
  for (const ReducedSample& s : series.samples) out << fmt::format("{},{},{},{}\n", s.t, s.r, s.nu, s.omega);
}

LoadedReduced read_reduced_csv(std::istream& in) {
  const CsvHeader h = read_csv_header(in);
  if (h.columns.size() != 4) throw DomainError("reduced CSV must have 4 columns");
  LoadedReduced loaded;
  loaded.config = h.config;
  ReducedSeries& s = loaded.series;
  s.kind = reduced_kind_from_string(require(h.meta, "kind"));
  s.curv = Curvature(parse_double(require(h.meta, "kappa")));
  s.c = parse_double(require(h.meta, "c"));
  s.m = parse_double(require(h.meta, "m"));
  s.reason = termination_reason_from_string(require(h.meta, "reason"));
  s.start_reason = termination_reason_from_string(require(h.meta, "start_reason"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) throw DomainError(fmt::format("malformed reduced row '{}'", line));
    s.samples.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3]), 0.0});
  }
  recompute_nu_dot(s);
  return loaded;
}

void write_reduced_jsonl(std::ostream& out, const ReducedSeries& series, const json& config) {
  out << reduced_meta(series, config).dump() << '\n';
  for (const ReducedSample& s : series.samples) {
    out << json{{"t", s.t}, {"r", s.r}, {"nu", s.nu}, {"omega", s.omega}}.dump() << '\n';
  }
}

LoadedReduced read_reduced_jsonl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty reduced file");
  const json meta = json::parse(line);
  LoadedReduced loaded;
  loaded.config = meta.value("config", json::object());
  ReducedSeries& s = loaded.series;
  s.kind = reduced_kind_from_string(meta.at("kind").get<std::string>());
  s.curv = Curvature(meta.at("kappa").get<double>());
  s.c = meta.at("c").get<double>();
  s.m = meta.at("m").get<double>();
  s.reason = termination_reason_from_string(meta.at("reason").get<std::string>());
  s.start_reason = termination_reason_from_string(meta.at("start_reason").get<std::string>());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json row = json::parse(line);
    s.samples.push_back({row.at("t").get<double>(), row.at("r").get<double>(), row.at("nu").get<double>(),
                         row.at("omega").get<double>(), 0.0});
  }
  recompute_nu_dot(s);
  return loaded;
}

json to_json(const FixedPointRecord& record) {
  return {{"r", record.r},
          {"kind", to_string(record.kind)},
          {"eigenvalues", {complex_json(record.eigenvalues[0]), complex_json(record.eigenvalues[1])}},
          {"stability", to_string(record.stability)}};
}

FixedPointRecord fixed_point_from_json(const json& j) {
  FixedPointRecord rec;
  rec.r = j.at("r").get<double>();
  rec.kind = fixed_point_kind_from_string(j.at("kind").get<std::string>());
  rec.eigenvalues = {complex_from(j.at("eigenvalues").at(0)), complex_from(j.at("eigenvalues").at(1))};
  rec.stability = stability_from_string(j.at("stability").get<std::string>());
  return rec;
}

json to_json(const std::vector<FixedPointRecord>& records) {
  json out = json::array();
  for (const FixedPointRecord& r : records) out.push_back(to_json(r));
  return out;
}

json portrait_to_json(const PortraitData& data, const json& config) {
  json cells = json::array();
  for (const PortraitCell& c : data.cells) {
    json cell = {{"r0", c.r0}, {"nu0", c.nu0}, {"valid", c.valid}};
    if (c.valid) {
      cell["class"] = to_string(c.cls);
      cell["min_r"] = c.min_r;
      cell["max_r"] = c.max_r;
      cell["period"] = c.period ? json(*c.period) : json(nullptr);
    }
    cells.push_back(std::move(cell));
  }
  return {{"config", config},
          {"kind", to_string(data.kind)},
          {"kappa", data.curv.kappa()},
          {"c", data.c},
          {"m", data.m},
          {"r_range", data.r_range},
          {"nu_range", data.nu_range},
          {"grid", {data.nr, data.nnu}},
          {"t_span", data.t_span},
          {"escape_radius", data.escape_radius},
          {"fixed_points", to_json(data.fixed_points)},
          {"cells", std::move(cells)}};
}

PortraitData portrait_from_json(const json& j) {
  PortraitData d;
  d.kind = reduced_kind_from_string(j.at("kind").get<std::string>());
  d.curv = Curvature(j.at("kappa").get<double>());
  d.c = j.at("c").get<double>();
  d.m = j.at("m").get<double>();
  d.r_range = j.at("r_range").get<std::array<double, 2>>();
  d.nu_range = j.at("nu_range").get<std::array<double, 2>>();
  d.nr = j.at("grid").at(0).get<std::size_t>();
  d.nnu = j.at("grid").at(1).get<std::size_t>();
  d.t_span = j.at("t_span").get<double>();
  d.escape_radius = j.at("escape_radius").get<double>();
  for (const json& fp : j.at("fixed_points")) d.fixed_points.push_back(fixed_point_from_json(fp));
  for (const json& c : j.at("cells")) {
    PortraitCell cell;
    cell.r0 = c.at("r0").get<double>();
    cell.nu0 = c.at("nu0").get<double>();
    cell.valid = c.at("valid").get<bool>();
    if (cell.valid) {
      cell.cls = orbit_class_from_string(c.at("class").get<std::string>());
      cell.min_r = c.at("min_r").get<double>();
      cell.max_r = c.at("max_r").get<double>();
      if (!c.at("period").is_null()) cell.period = c.at("period").get<double>();
    }
    d.cells.push_back(cell);
  }
  if (d.cells.size() != d.nr * d.nnu) throw DomainError("portrait cell count does not match the grid");
  return d;
}

void write_portrait_csv(std::ostream& out, const PortraitData& data, const json& config) {
  out << fmt::format("# kind={} kappa={} c={} m={} t_span={}\n", to_string(data.kind), data.curv.kappa(), data.c,
                     data.m, data.t_span);
  out << kConfigPrefix << config.dump() << '\n';
  out << "r0,nu0,class,min_r,max_r,period\n";
  for (const PortraitCell& c : data.cells) {
    if (!c.valid) {
      out << fmt::format("{},{},INVALID,,,\n", c.r0, c.nu0);
      continue;
    }
    out << fmt::format("{},{},{},{},{},{}\n", c.r0, c.nu0, to_string(c.cls), c.min_r, c.max_r,
                       c.period ? fmt::format("{}", *c.period) : std::string());
  }
}

}  // namespace curved3b
