#pragma once
// Declarative case configuration, run manifests and CSV emission for the
// command-line driver. A SimulationConfig round-trips through JSON, and a
// run manifest echoes the config it ran, so any recorded run can be
// repeated bit-identically (the solver itself is deterministic for any
// thread count).

#include <swlbm/benchmarks.hpp>
#include <swlbm/solver.hpp>

#include <json.hpp>

#include <cmath>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swlbm::io {

inline constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Configuration.

struct SideConfig {
  std::string kind = "wall";  // wall | slip | periodic | inflow-discharge |
                              // inflow-depth | outflow-depth | outflow-velocity
  double q = 0.0;             // inflow-discharge: unit-width discharge
  double h = 0.0;             // outflow-depth: prescribed depth
  double ux = 0.0, uy = 0.0;  // outflow-velocity: prescribed velocity
  double ramp_time = 0.0;     // inflow-discharge: startup ramp seconds
  std::string signal;         // inflow-depth: named signal ("tidal-west")
};

struct RunControl {
  std::string mode = "steady";  // steady | transient
  double tol = 5e-6;
  long max_iter = 100000;
  double t_end = 0.0;  // transient only
};

struct SimulationConfig {
  std::string family = "d2q9-salmon";  // d2q9-salmon | d2q9-standard |
                                       // d2q9-lambda | d2q7
  double g = 9.81;                     // physical acceleration, m/s^2
  double e = 15.0;                     // lattice link speed, m/s
  double tau = 1.5;                    // scaled relaxation time
  double lambda = 1.0;                 // d2q9-lambda family parameter
  int nx = 125, ny = 50;
  double dx = 0.2;         // m; dt = dx / e
  std::string bed = "flat";  // flat | bump | tidal
  std::string ic = "level";  // level: h = level - z_b | column: h = H(x)
  double level = 2.0;        // free-surface elevation for ic = level
  double noise = 0.0;        // relative startup depth perturbation
  SideConfig west, east, south, north;
  RunControl run;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SideConfig, kind, q, h, ux,
                                                uy, ramp_time, signal)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunControl, mode, tol,
                                                max_iter, t_end)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SimulationConfig, family, g,
                                                e, tau, lambda, nx, ny, dx,
                                                bed, ic, level, noise, west,
                                                east, south, north, run)

inline bool operator==(const SimulationConfig& a, const SimulationConfig& b) {
  return nlohmann::json(a) == nlohmann::json(b);
}

// ---------------------------------------------------------------------------
// Config -> solver objects.

inline Family family_from_name(const std::string& name) {
  if (name == "d2q9-salmon") return Family::D2Q9Salmon;
  if (name == "d2q9-standard") return Family::D2Q9Standard;
  if (name == "d2q9-lambda") return Family::D2Q9Lambda;
  if (name == "d2q7") return Family::D2Q7;
  throw std::invalid_argument("unknown equilibrium family: " + name);
}

inline SideKind side_kind_from_name(const std::string& name) {
  if (name == "wall") return SideKind::Wall;
  if (name == "slip") return SideKind::SlipWall;
  if (name == "periodic") return SideKind::Periodic;
  if (name == "inflow-discharge") return SideKind::InflowDischarge;
  if (name == "inflow-depth") return SideKind::InflowDepth;
  if (name == "outflow-depth") return SideKind::OutflowDepth;
  if (name == "outflow-velocity") return SideKind::OutflowVelocity;
  throw std::invalid_argument("unknown side kind: " + name);
}

inline SideSpec side_from_config(const SideConfig& c) {
  SideSpec s;
  s.kind = side_kind_from_name(c.kind);
  s.q = c.q;
  s.h = c.h;
  s.u = Vec2{c.ux, c.uy};
  s.ramp_time = c.ramp_time;
  if (!c.signal.empty()) {
    if (c.signal == "tidal-west")
      s.depth_signal = [](double t) { return bench::tidal_depth(0.0, t); };
    else
      throw std::invalid_argument("unknown depth signal: " + c.signal);
  }
  return s;
}

inline bench::CaseInstance make_case(const SimulationConfig& c) {
  const Family fam = family_from_name(c.family);
  const Model model = (fam == Family::D2Q7) ? Model::D2Q7 : Model::D2Q9;
  auto spec = make_spec(fam, c.g, c.e, c.lambda);
  auto F = make_field(model, c.e, c.nx, c.ny, c.dx);
  if (c.bed == "flat") {
    // zero bed is the default
  } else if (c.bed == "bump") {
    set_bed(F, [](double x, double) { return bench::bump_bed(x); });
  } else if (c.bed == "tidal") {
    const double z0 = bench::tidal_column(0.0);
    set_bed(F, [z0](double x, double) { return z0 - bench::tidal_column(x); });
  } else {
    throw std::invalid_argument("unknown bed preset: " + c.bed);
  }
  Boundaries bc;
  bc.west = side_from_config(c.west);
  bc.east = side_from_config(c.east);
  bc.south = side_from_config(c.south);
  bc.north = side_from_config(c.north);
  auto P = build_plan(F, spec, c.tau, bc);
  std::vector<double> h0(std::size_t(c.nx) * c.ny);
  std::vector<Vec2> u0(h0.size(), Vec2{});
  for (int y = 0; y < c.ny; ++y)
    for (int x = 0; x < c.nx; ++x) {
      if (c.ic == "level")
        h0[F.nidx(x, y)] = c.level - F.zb[F.nidx(x, y)];
      else if (c.ic == "column")
        h0[F.nidx(x, y)] = bench::tidal_column(F.x_of(x));
      else
        throw std::invalid_argument("unknown initial condition: " + c.ic);
    }
  bench::perturb_depth(h0, c.nx, c.ny, c.noise);
  initialize_equilibrium(F, P.eq, h0, u0);
  return {std::move(F), std::move(P)};
}

// ---------------------------------------------------------------------------
// Run manifest.

struct Metric {
  std::string name;
  double value = 0.0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Metric, name, value)

struct Manifest {
  std::string version = kVersion;
  std::string started, finished;  // ISO-8601 UTC
  SimulationConfig config;
  bool converged = false;
  bool diverged = false;
  long iterations = 0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  double simulated_time = 0.0;
  std::vector<Metric> metrics;
  std::vector<std::string> outputs;  // files written alongside the manifest
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Manifest, version, started,
                                                finished, config, converged,
                                                diverged, iterations,
                                                residual, simulated_time,
                                                metrics, outputs)

inline std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void fill_result(Manifest& m, const RunResult& r) {
  m.converged = r.converged;
  m.diverged = r.diverged;
  m.iterations = r.iterations;
  m.residual = r.final_residual;
  m.simulated_time = r.time;
}

inline void save_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return nlohmann::json::parse(in);
}

// ---------------------------------------------------------------------------
// CSV emission (RFC-4180-style: comma-separated, one header row, LF line
// endings; all cells are plain numbers or bare words, so no quoting is
// required).

inline void write_csv(const std::string& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? ',' : '\n');
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? ',' : '\n');
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Full-field snapshot: one row per fluid node.
inline void write_field_csv(const std::string& path,
                            const DistributionField& F) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(std::size_t(F.nx) * F.ny);
  for (int y = 0; y < F.ny; ++y)
    for (int x = 0; x < F.nx; ++x) {
      if (!F.fluid(x, y)) continue;
      const auto m = F.macro(x, y);
      rows.push_back({num(F.x_of(x)), num(F.y_of(y)), num(m.h), num(m.u.x),
                      num(m.u.y)});
    }
  write_csv(path, {"x", "y", "h", "u1", "u2"}, rows);
}

}  // namespace swlbm::io
