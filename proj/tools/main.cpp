#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "curved3b/dynamics.hpp"
#include "curved3b/errors.hpp"
#include "curved3b/fixedpoints.hpp"
#include "curved3b/flowatlas.hpp"
#include "curved3b/homographic.hpp"
#include "curved3b/presets.hpp"
#include "curved3b/serialize.hpp"
#include "curved3b/verify.hpp"

namespace {

using json = nlohmann::json;
using namespace curved3b;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSingular = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<double> kappa;
  std::optional<double> c;
  std::optional<double> m;
  std::optional<std::string> kind;
  std::string preset;
  std::string out = "-";
  bool csv = false;
  std::optional<double> tol;
  std::optional<double> t_end;
  std::uint64_t seed = 1729;

  std::optional<double> r0;
  double nu0 = 0.0;
  double omega0 = 0.0;
  std::optional<double> rho0;
  double rho_dot0 = 0.0;
  std::optional<double> omega_dot0;

  std::vector<double> r_range;
  std::vector<double> nu_range;
  std::optional<std::size_t> grid;
  std::optional<std::size_t> nr;
  std::optional<std::size_t> nnu;
  std::optional<double> t_span;
  unsigned threads = 0;

  std::string check = "all";
  int trials = 0;
};

// Parameters after the preset, if any, has been folded under the explicit flags.
struct Resolved {
  std::string kind;
  double kappa = 0.0;
  double c = 0.0;
  double m = 1.0;
  const Preset* preset = nullptr;
  StepControl ctrl;
};

Resolved resolve(const Options& o) {
  Resolved r;
  if (!o.preset.empty()) {
    try {
      r.preset = &find_preset(o.preset);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
  if (o.kappa) {
    r.kappa = *o.kappa;
  } else if (r.preset != nullptr) {
    r.kappa = r.preset->kappa;
  } else {
    throw UsageError("--kappa is required");
  }
  r.kind = o.kind.value_or(r.preset != nullptr ? std::string(to_string(r.preset->kind)) : "lagrangian");
  r.c = o.c.value_or(r.preset != nullptr ? r.preset->c : 0.0);
  r.m = o.m.value_or(r.preset != nullptr ? r.preset->m : 1.0);
  if (r.kappa == 0.0 || !std::isfinite(r.kappa)) throw UsageError("--kappa must be finite and nonzero");
  if (!(r.m > 0.0) || !std::isfinite(r.m)) throw UsageError("--m must be positive");
  if (!std::isfinite(r.c)) throw UsageError("--c must be finite");
  if (o.tol) {
    r.ctrl.relative_tolerance = *o.tol;
    r.ctrl.absolute_tolerance = *o.tol * 1e-2;
  }
  try {
    r.ctrl.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return r;
}

ReducedKind reduced_kind(const Resolved& r) {
  if (r.kind == "hyperbolic") throw UsageError("this command needs --kind lagrangian or eulerian");
  return reduced_kind_from_string(r.kind);
}

json base_config(std::string_view command, const Options& o, const Resolved& r) {
  json j = {{"command", command},
            {"kind", r.kind},
            {"kappa", r.kappa},
            {"c", r.c},
            {"m", r.m},
            {"seed", o.seed},
            {"step_control",
             {{"relative_tolerance", r.ctrl.relative_tolerance}, {"absolute_tolerance", r.ctrl.absolute_tolerance}}},
            {"output", {{"path", o.out}, {"format", o.csv ? "csv" : "jsonl"}}}};
  if (r.preset != nullptr) j["preset"] = r.preset->name;
  return j;
}

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path == "-") return;
    file_.open(path);
    if (!file_) throw UsageError(fmt::format("cannot open {} for writing", path));
  }
  std::ostream& data() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  // Summaries go to stdout unless the data itself does.
  std::ostream& notes() { return file_.is_open() ? std::cout : std::cerr; }

 private:
  std::ofstream file_;
};

bool singular_reduced_end(const ReducedSeries& s) {
  if (s.reason != TerminationReason::BoundaryApproach || s.samples.empty()) return false;
  const double r = s.samples.back().r;
  return !(s.curv.positive() && s.curv.kappa() * r * r >= 0.5);
}

int cmd_simulate(const Options& o) {
  const Resolved r = resolve(o);
  const Curvature curv(r.kappa);
  const double t_end = o.t_end.value_or(10.0);
  json config = base_config("simulate", o, r);
  config["t_end"] = t_end;

  SystemState initial;
  if (r.kind == "hyperbolic") {
    if (!o.rho0) throw UsageError("--rho0 is required for --kind hyperbolic");
    const double rate = o.omega_dot0 ? *o.omega_dot0 : hyperbolic_re_rate(*o.rho0, curv, r.m);
    const HyperbolicState hs{*o.rho0, o.rho_dot0, o.omega0, rate};
    config["initial"] = {{"rho", hs.rho}, {"rho_dot", hs.rho_dot}, {"omega", hs.omega}, {"omega_dot", hs.omega_dot}};
    initial = embed_hyperbolic(hs, curv, r.m);
  } else {
    if (!o.r0) throw UsageError("--r0 is required");
    const ReducedState rs{*o.r0, o.nu0, o.omega0, r.c};
    config["initial"] = {{"r", rs.r}, {"nu", rs.nu}, {"omega", rs.omega}};
    initial = embed(reduced_kind(r), rs, curv, r.m);
  }

  const TrajectorySeries series = integrate(initial, t_end, r.ctrl);
  Sink sink(o.out);
  if (o.csv) {
    write_trajectory_csv(sink.data(), series, config);
  } else {
    write_trajectory_jsonl(sink.data(), series, config);
  }

  const ConservationDrift drift = conservation_drift(series);
  ConstraintResiduals worst;
  for (const TrajectorySample& s : series.samples) {
    const ConstraintResiduals c = constraint_residuals(s.state);
    worst.manifold = std::max(worst.manifold, c.manifold);
    worst.tangency = std::max(worst.tangency, c.tangency);
  }
  sink.notes() << fmt::format(
      "{}: {} samples to t = {}; energy drift {:.3e}, angular momentum drift {:.3e}, manifold {:.3e}, "
      "tangency {:.3e}\n",
      to_string(series.reason), series.samples.size(), series.samples.back().state.t, drift.energy,
      drift.angular_momentum, worst.manifold, worst.tangency);
  return series.reason == TerminationReason::CollisionApproach ? kExitSingular : kExitOk;
}

int cmd_reduce(const Options& o) {
  const Resolved r = resolve(o);
  const ReducedKind kind = reduced_kind(r);
  const Curvature curv(r.kappa);
  if (!o.r0) throw UsageError("--r0 is required");
  const double t_end = o.t_end.value_or(10.0);
  const ReducedState rs{*o.r0, o.nu0, o.omega0, r.c};
  json config = base_config("reduce", o, r);
  config["t_end"] = t_end;
  config["initial"] = {{"r", rs.r}, {"nu", rs.nu}, {"omega", rs.omega}};

  const ReducedSeries series = integrate_reduced(kind, rs, curv, r.m, t_end, r.ctrl);
  Sink sink(o.out);
  if (o.csv) {
    write_reduced_csv(sink.data(), series, config);
  } else {
    write_reduced_jsonl(sink.data(), series, config);
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const ReducedSample& s : series.samples) {
    lo = std::min(lo, s.r);
    hi = std::max(hi, s.r);
  }
  sink.notes() << fmt::format("{}: {} samples to t = {}; r in [{:.9g}, {:.9g}]\n", to_string(series.reason),
                              series.samples.size(), series.samples.back().t, lo, hi);
  return singular_reduced_end(series) ? kExitSingular : kExitOk;
}

int cmd_fixedpoints(const Options& o) {
  const Resolved r = resolve(o);
  const ReducedKind kind = reduced_kind(r);
  const Curvature curv(r.kappa);
  const std::vector<FixedPointRecord> fps = fixed_points(kind, curv, r.c, r.m);
  const json config = base_config("fixedpoints", o, r);

  json diagnostics = json::object();
  if (kind == ReducedKind::Lagrangian && curv.positive()) {
    const double t = lagrangian_threshold(curv, r.c, r.m);
    diagnostics["threshold"] = t;
    diagnostics["interior_expected"] = t < 0.0 ? 2 : 1;
  }
  if (kind == ReducedKind::Eulerian && !curv.positive()) {
    diagnostics["existence_sign"] = eulerian_existence(curv, r.c, r.m);
  }
  std::size_t interior = 0;
  for (const FixedPointRecord& fp : fps) interior += fp.kind == FixedPointKind::Interior ? 1 : 0;
  diagnostics["interior_count"] = interior;

  Sink sink(o.out);
  if (o.csv) {
    std::ostream& out = sink.data();
    out << "# config: " << config.dump() << '\n';
    out << "# diagnostics: " << diagnostics.dump() << '\n';
    out << "r,kind,stability,re1,im1,re2,im2\n";
    for (const FixedPointRecord& fp : fps) {
      out << fmt::format("{},{},{},{},{},{},{}\n", fp.r, to_string(fp.kind), to_string(fp.stability),
                         fp.eigenvalues[0].real(), fp.eigenvalues[0].imag(), fp.eigenvalues[1].real(),
                         fp.eigenvalues[1].imag());
    }
  } else {
    sink.data() << json{{"config", config}, {"fixed_points", to_json(fps)}, {"diagnostics", diagnostics}}.dump()
                << '\n';
  }
  return kExitOk;
}

std::array<double, 2> range_or(const std::vector<double>& given, const Preset* preset,
                               std::array<double, 2> Preset::*field, std::string_view flag) {
  if (!given.empty()) return {given[0], given[1]};
  if (preset != nullptr) return preset->*field;
  throw UsageError(fmt::format("{} is required without --preset", flag));
}

int cmd_portrait(const Options& o) {
  const Resolved r = resolve(o);
  const ReducedKind kind = reduced_kind(r);
  const Curvature curv(r.kappa);
  const std::array<double, 2> r_range = range_or(o.r_range, r.preset, &Preset::r_range, "--r-range");
  const std::array<double, 2> nu_range = range_or(o.nu_range, r.preset, &Preset::nu_range, "--nu-range");
  const std::size_t base = o.grid.value_or(r.preset != nullptr ? r.preset->grid : 21);
  const std::size_t nr = o.nr.value_or(base);
  const std::size_t nnu = o.nnu.value_or(base);
  if (nr == 0 || nnu == 0) throw UsageError("grid sizes must be positive");
  const double t_span = o.t_span.value_or(r.preset != nullptr ? r.preset->t_span : 100.0);
  if (!(t_span > 0.0)) throw UsageError("--t-span must be positive");

  json config = base_config("portrait", o, r);
  config["grid"] = {{"r_range", r_range}, {"nu_range", nu_range}, {"nr", nr}, {"nnu", nnu}, {"t_span", t_span}};

  SweepOptions opts;
  opts.ctrl = r.ctrl;
  opts.threads = o.threads;
  const PortraitData data = sweep(kind, curv, r.c, r.m, r_range, nu_range, nr, nnu, t_span, opts);
  Sink sink(o.out);
  if (o.csv) {
    write_portrait_csv(sink.data(), data, config);
  } else {
    sink.data() << portrait_to_json(data, config).dump() << '\n';
  }

  std::array<std::size_t, 9> counts{};
  std::size_t invalid = 0;
  for (const PortraitCell& cell : data.cells) {
    if (!cell.valid) {
      ++invalid;
      continue;
    }
    ++counts[static_cast<std::size_t>(cell.cls)];
  }
  std::string tally;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    tally += fmt::format(" {}={}", to_string(static_cast<OrbitClass>(k)), counts[k]);
  }
  sink.notes() << fmt::format("{} cells ({} invalid):{}\n", data.cells.size(), invalid, tally);
  return kExitOk;
}

int cmd_verify(const Options& o) {
  VerifyOptions opts;
  opts.seed = o.seed;
  opts.trials = o.trials;
  std::vector<CheckResult> results;
  if (o.check == "all") {
    results = run_all(opts);
  } else {
    const auto& names = check_names();
    if (std::find(names.begin(), names.end(), o.check) == names.end()) {
      throw UsageError(fmt::format("unknown check '{}'", o.check));
    }
    results.push_back(run_check(o.check, opts));
  }
  bool all = true;
  for (const CheckResult& res : results) {
    all = all && res.passed;
    std::cout << fmt::format("{:<16} {}  {:7.2f}s  {}\n", res.name, res.passed ? "PASS" : "FAIL", res.seconds,
                             res.detail);
  }
  return all ? kExitOk : kExitVerifyFailed;
}

void add_model_flags(CLI::App* sub, Options& o) {
  sub->add_option("--kappa", o.kappa, "Curvature, nonzero");
  sub->add_option("--c", o.c, "Angular momentum constant");
  sub->add_option("--m", o.m, "Common mass, positive");
  sub->add_option("--kind", o.kind, "Solution family")
      ->check(CLI::IsMember({"lagrangian", "eulerian", "hyperbolic"}));
  sub->add_option("--preset", o.preset, "Named parameter set: fig1a fig1b fig2a fig2b fig3 fig4a fig4b");
  sub->add_option("--tol", o.tol, "Relative step tolerance (absolute is 1e-2 of it)");
}

void add_output_flags(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "Output path, - for stdout");
  sub->add_flag("--csv", o.csv, "Write CSV instead of JSON lines");
  sub->add_option("--seed", o.seed, "Seed recorded in the run configuration");
}

void add_initial_flags(CLI::App* sub, Options& o) {
  sub->add_option("--r0", o.r0, "Initial size");
  sub->add_option("--nu0", o.nu0, "Initial size rate");
  sub->add_option("--omega0", o.omega0, "Initial rotation angle");
  sub->add_option("--t-end", o.t_end, "Integration end time (default 10)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-body homographic orbits on the sphere and the hyperbolic plane."};
  app.require_subcommand(1);
  Options o;

  CLI::App* simulate = app.add_subcommand("simulate", "Integrate the full system from an embedded ansatz");
  add_model_flags(simulate, o);
  add_output_flags(simulate, o);
  add_initial_flags(simulate, o);
  simulate->add_option("--rho0", o.rho0, "Hyperbolic: initial distance of the outer bodies");
  simulate->add_option("--rho-dot0", o.rho_dot0, "Hyperbolic: initial rate of rho");
  simulate->add_option("--omega-dot0", o.omega_dot0,
                       "Hyperbolic: initial boost rate (default: relative-equilibrium rate)");

  CLI::App* reduce = app.add_subcommand("reduce", "Integrate the reduced (r, nu) system");
  add_model_flags(reduce, o);
  add_output_flags(reduce, o);
  add_initial_flags(reduce, o);

  CLI::App* fixed = app.add_subcommand("fixedpoints", "List and classify fixed points of the reduced system");
  add_model_flags(fixed, o);
  add_output_flags(fixed, o);

  CLI::App* portrait = app.add_subcommand("portrait", "Classify a grid of reduced orbits");
  add_model_flags(portrait, o);
  add_output_flags(portrait, o);
  portrait->add_option("--r-range", o.r_range, "r_min r_max")->expected(2);
  portrait->add_option("--nu-range", o.nu_range, "nu_min nu_max")->expected(2);
  portrait->add_option("--grid", o.grid, "Cells per axis");
  portrait->add_option("--nr", o.nr, "Cells along r");
  portrait->add_option("--nnu", o.nnu, "Cells along nu");
  portrait->add_option("--t-span", o.t_span, "Time integrated each way per cell");
  portrait->add_option("--threads", o.threads, "Worker threads, 0 for all cores");

  CLI::App* verify = app.add_subcommand("verify", "Run the acceptance checks");
  verify->add_option("--check", o.check, "Check name, or all");
  verify->add_option("--trials", o.trials, "Override the trial count");
  verify->add_option("--seed", o.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    if (chosen == simulate) return cmd_simulate(o);
    if (chosen == reduce) return cmd_reduce(o);
    if (chosen == fixed) return cmd_fixedpoints(o);
    if (chosen == portrait) return cmd_portrait(o);
    return cmd_verify(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << chosen->help();
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SingularConfiguration& e) {
    std::cerr << "error: initial state is singular: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StepUnderflow& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSingular;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
