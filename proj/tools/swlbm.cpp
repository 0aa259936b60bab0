// Command-line front end for the shallow-water lattice Boltzmann toolkit.
//
//   swlbm stability check  — verdict for one parameter point (exit 0/1/2)
//   swlbm stability scan   — verdict map over a (g, lambda) grid, as CSV
//   swlbm sim run          — run a case described by a JSON config
//   swlbm bench hump       — steady channel flow over a parabolic bed bump
//   swlbm bench tidal      — tidal channel flow vs asymptotic solution
//   swlbm bench expansion  — flow past a sudden channel expansion
//   swlbm bench table      — canonical sweep tables with reference counts
//
// Exit codes: 0 = success (Stable / converged / sweep completed),
// 1 = Unstable / diverged, 2 = argument or runtime error (Indeterminate).
//
// Outputs land in --out-dir, or $SWLBM_OUT_DIR, or the working directory.

#include <swlbm/benchmarks.hpp>
#include <swlbm/diagnostics.hpp>
#include <swlbm/io.hpp>
#include <swlbm/solver.hpp>
#include <swlbm/stability.hpp>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

namespace {

using namespace swlbm;

std::string resolve_out_dir(const std::string& flag_value) {
  std::string dir = flag_value;
  if (dir.empty())
    if (const char* env = std::getenv("SWLBM_OUT_DIR")) dir = env;
  if (dir.empty()) dir = ".";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void print_stability_report(const StabilityReport& r, const EquilibriumSpec& s) {
  std::printf("family             %s\n", family_name(s.family));
  std::printf("g                  %.10g\n", s.g);
  std::printf("e                  %.10g\n", s.e);
  if (s.family == Family::D2Q9Lambda)
    std::printf("lambda             %.10g\n", s.lambda);
  std::printf("hbar               %.10g\n", r.hbar);
  std::printf("tau                %.10g\n", r.tau);
  std::printf("verdict            %s\n", verdict_name(r.verdict));
  std::printf("projection defect  %.3e\n", r.projection_defect);
  std::printf("symmetry defect    %.3e\n", r.symmetry_defect);
  std::printf("scaling positive   %s\n", r.scaling_positive ? "yes" : "no");
  std::printf("jacobian rank      %d\n", r.jacobian_rank);
  std::printf("collision rank     %d\n", r.collision_rank);
  std::printf("conserved modes    %d\n", r.modes_conserved);
  std::printf("relaxing modes     %d\n", r.modes_relaxing);
}

int run_stability_check(const std::string& model, double g, double e,
                        double hbar, double tau, double lambda) {
  auto spec = make_spec(io::family_from_name(model), g, e, lambda);
  auto rep = verify_stability(spec, hbar, tau);
  print_stability_report(rep, spec);
  switch (rep.verdict) {
    case Verdict::Stable: return 0;
    case Verdict::Unstable: return 1;
    case Verdict::Indeterminate: return 2;
  }
  return 2;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  if (n <= 1) {
    v.push_back(lo);
    return v;
  }
  for (int i = 0; i < n; ++i)
    v.push_back(lo + (hi - lo) * double(i) / double(n - 1));
  return v;
}

int run_stability_scan(const std::string& model, double g_from, double g_to,
                       int g_steps, double l_from, double l_to, int l_steps,
                       double e, double hbar, double tau,
                       const std::string& out_path) {
  if (g_steps < 1 || l_steps < 1)
    throw std::invalid_argument("scan: step counts must be at least 1");
  const Family fam = io::family_from_name(model);
  auto base = make_spec(fam, g_from > 0 ? g_from : 1.0, e, 1.0);
  const auto gs = linspace(g_from, g_to, g_steps);
  const auto lams = (fam == Family::D2Q9Lambda)
                        ? linspace(l_from, l_to, l_steps)
                        : std::vector<double>{};
  auto cells = scan(base, gs, lams, hbar, tau);
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : cells)
    rows.push_back({io::num(c.g), io::num(c.lambda), c.verdict,
                    io::num(c.projection_defect), io::num(c.symmetry_defect),
                    std::to_string(c.rank)});
  io::write_csv(out_path,
                {"g", "lambda", "verdict", "projection_defect",
                 "symmetry_defect", "collision_rank"},
                rows);
  std::printf("wrote %zu rows to %s\n", rows.size(), out_path.c_str());
  return 0;
}

int finish_run(io::Manifest m, bench::CaseInstance& ci, const RunResult& r,
               const std::string& dir, const std::string& stem) {
  io::fill_result(m, r);
  const std::string field_csv = join(dir, stem + "_field.csv");
  io::write_field_csv(field_csv, ci.field);
  m.outputs.push_back(field_csv);
  m.finished = io::utc_timestamp();
  const std::string manifest_path = join(dir, stem + "_manifest.json");
  io::save_json(manifest_path, nlohmann::json(m));
  std::printf("%s: %s after %ld steps (R = %.3e, t = %.2f s)\n",
              stem.c_str(),
              r.converged   ? "converged"
              : r.diverged  ? "diverged"
                            : "stopped at step limit",
              r.iterations, r.final_residual, r.time);
  std::printf("manifest: %s\n", manifest_path.c_str());
  return r.converged || (!r.diverged && !m.config.run.mode.empty() &&
                         m.config.run.mode == "transient")
             ? 0
             : 1;
}

int run_sim(const std::string& config_path, const std::string& out_dir) {
  io::Manifest m;
  m.started = io::utc_timestamp();
  m.config = io::load_json(config_path).get<io::SimulationConfig>();
  auto ci = io::make_case(m.config);
  RunResult r;
  if (m.config.run.mode == "steady")
    r = run_to_steady(ci.field, ci.plan, m.config.run.tol,
                      m.config.run.max_iter);
  else if (m.config.run.mode == "transient")
    r = run_transient(ci.field, ci.plan, m.config.run.t_end);
  else
    throw std::invalid_argument("unknown run mode: " + m.config.run.mode);
  return finish_run(std::move(m), ci, r, resolve_out_dir(out_dir), "sim");
}

bool parse_lattice(const std::string& s, int& nx, int& ny) {
  if (s.empty()) return false;
  const auto x = s.find('x');
  if (x == std::string::npos) return false;
  nx = std::atoi(s.substr(0, x).c_str());
  ny = std::atoi(s.substr(x + 1).c_str());
  return nx > 2 && ny > 2;
}

io::SimulationConfig bump_config(double g_row, int nx, double lambda) {
  io::SimulationConfig c;
  c.family = (lambda == 1.0) ? "d2q9-salmon" : "d2q9-lambda";
  c.lambda = lambda;
  c.e = bench::BumpChannel::kLinkSpeed;
  c.tau = bench::BumpChannel::kTauHat;
  c.nx = nx;
  c.ny = bench::BumpChannel::kRows;
  c.dx = bench::BumpChannel::kLength / nx;
  c.g = g_row * c.e * c.e / c.dx;
  c.bed = "bump";
  c.ic = "level";
  c.level = bench::BumpChannel::kOutletDepth;
  c.noise = bench::BumpChannel::kNoise;
  c.west.kind = "inflow-discharge";
  c.west.q = bench::BumpChannel::kDischarge;
  c.west.ramp_time = bench::BumpChannel::kRampTime;
  c.east.kind = "outflow-depth";
  c.east.h = bench::BumpChannel::kOutletDepth;
  c.south.kind = c.north.kind = "slip";
  return c;
}

int run_bench_hump(double g_row, const std::string& lattice, double lambda,
                   const std::string& out_dir) {
  int nx = 500, ny = bench::BumpChannel::kRows;
  if (!lattice.empty() && !parse_lattice(lattice, nx, ny))
    throw std::invalid_argument("bad --lattice, expected NXxNY: " + lattice);
  if (ny != bench::BumpChannel::kRows)
    throw std::invalid_argument("hump case fixes the row count at 50");
  io::Manifest m;
  m.started = io::utc_timestamp();
  m.config = bump_config(g_row, nx, lambda);
  auto ci = io::make_case(m.config);
  auto r = run_to_steady(ci.field, ci.plan, m.config.run.tol,
                         m.config.run.max_iter);
  const std::string dir = resolve_out_dir(out_dir);
  if (r.converged) {
    auto acc = bench::bump_accuracy(ci.field, m.config.g);
    m.metrics.push_back({"depth_l2_vs_analytic", acc.depth_l2});
    m.metrics.push_back({"discharge_l2_vs_inflow", acc.discharge_l2});
    m.metrics.push_back({"discharge_max_rel_dev", acc.discharge_max});
    std::printf("depth L2 error     %.4e\n", acc.depth_l2);
    std::printf("discharge L2 error %.4e\n", acc.discharge_l2);
    std::vector<double> xs(ci.field.nx);
    for (int i = 0; i < ci.field.nx; ++i) xs[i] = ci.field.x_of(i);
    auto href = bench::bump_analytic_depth(
        m.config.g, bench::BumpChannel::kDischarge,
        bench::BumpChannel::kOutletDepth, xs);
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < ci.field.nx; ++i)
      rows.push_back({io::num(xs[i]),
                      io::num(ci.field.depth[ci.field.nidx(i, 0)]),
                      io::num(href[i])});
    const std::string prof = join(dir, "hump_profile.csv");
    io::write_csv(prof, {"x", "h", "h_analytic"}, rows);
    m.outputs.push_back(prof);
  }
  return finish_run(std::move(m), ci, r, dir, "hump");
}

int run_bench_tidal(double dx, const std::string& lattice,
                    const std::string& out_dir) {
  if (!lattice.empty()) {
    int nx = 0, ny = 0;
    if (!parse_lattice(lattice, nx, ny))
      throw std::invalid_argument("bad --lattice, expected NXxNY: " + lattice);
    dx = bench::TidalChannel::kLength / nx;
  }
  auto ci = bench::tidal_case(dx);
  io::Manifest m;
  m.started = io::utc_timestamp();
  // Echo the equivalent declarative config.
  m.config.family = "d2q9-salmon";
  m.config.e = bench::TidalChannel::kLinkSpeed;
  m.config.tau = bench::TidalChannel::kTauHat;
  m.config.nx = ci.field.nx;
  m.config.ny = ci.field.ny;
  m.config.dx = dx;
  m.config.g = bench::TidalChannel::kGravityRow * m.config.e * m.config.e / dx;
  m.config.bed = "tidal";
  m.config.ic = "column";
  m.config.west.kind = "inflow-depth";
  m.config.west.signal = "tidal-west";
  m.config.east.kind = "outflow-velocity";
  m.config.south.kind = m.config.north.kind = "periodic";
  m.config.run.mode = "transient";
  m.config.run.t_end = bench::TidalChannel::kCompareTime;
  auto r = run_transient(ci.field, ci.plan, bench::TidalChannel::kCompareTime);
  const std::string dir = resolve_out_dir(out_dir);
  if (!r.diverged) {
    const double err = bench::tidal_depth_error(ci.field);
    m.metrics.push_back({"depth_l2_vs_asymptotic", err});
    std::printf("depth L2 error vs asymptotic solution at t = %.1f s: %.4e\n",
                ci.field.time, err);
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < ci.field.nx; ++i) {
      const double x = ci.field.x_of(i);
      const auto mac = ci.field.macro(i, 0);
      rows.push_back({io::num(x), io::num(mac.h),
                      io::num(bench::tidal_depth(x, ci.field.time)),
                      io::num(mac.u.x),
                      io::num(bench::tidal_velocity(x, ci.field.time))});
    }
    const std::string prof = join(dir, "tidal_profile.csv");
    io::write_csv(prof, {"x", "h", "h_analytic", "u", "u_analytic"}, rows);
    m.outputs.push_back(prof);
  }
  return finish_run(std::move(m), ci, r, dir, "tidal");
}

int run_bench_expansion(double g_row, double lambda,
                        const std::string& out_dir) {
  auto ci = bench::expansion_case(g_row, lambda);
  io::Manifest m;
  m.started = io::utc_timestamp();
  m.config.family = (lambda == 1.0) ? "d2q9-salmon" : "d2q9-lambda";
  m.config.lambda = lambda;
  m.config.e = bench::Expansion::kDx / bench::Expansion::kDt;
  m.config.tau = bench::Expansion::kTauHat;
  m.config.nx = bench::Expansion::kCols;
  m.config.ny = bench::Expansion::kRows;
  m.config.dx = bench::Expansion::kDx;
  m.config.g = g_row * m.config.e * m.config.e / m.config.dx;
  m.config.noise = bench::Expansion::kNoise;
  m.config.west.kind = "inflow-discharge";
  m.config.west.q = bench::Expansion::kDischarge;
  m.config.east.kind = "outflow-depth";
  m.config.east.h = bench::Expansion::kOutletDepth;
  m.config.south.kind = m.config.north.kind = "wall";
  auto r = run_to_steady(ci.field, ci.plan);
  if (r.converged) {
    const bool recirc = bench::expansion_recirculation(ci.field);
    m.metrics.push_back({"recirculation_both_sides", recirc ? 1.0 : 0.0});
    std::printf("recirculation on both sides: %s\n", recirc ? "yes" : "no");
  }
  return finish_run(std::move(m), ci, r, resolve_out_dir(out_dir),
                    "expansion");
}

std::string canonical_table_id(std::string id) {
  for (auto& ch : id) ch = char(std::tolower(static_cast<unsigned char>(ch)));
  if (id == "t1") return "channel-gravity";
  if (id == "t2") return "channel-lambda";
  if (id == "t3") return "tidal";
  if (id == "t4") return "expansion-gravity";
  if (id == "t5") return "expansion-lambda";
  return id;
}

void write_sweep_csv(const std::string& path, const bench::SweepReport& rep) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : rep.cells) {
    std::string dev = "";
    if (c.converged && c.reference > 0)
      dev = io::num(100.0 * (double(c.iterations) - double(c.reference)) /
                    double(c.reference));
    rows.push_back({io::num(c.row_value), std::to_string(c.nx),
                    c.converged ? "converged" : "diverged",
                    std::to_string(c.iterations),
                    c.reference > 0 ? std::to_string(c.reference) : "-",
                    dev});
  }
  io::write_csv(path,
                {"row_value", "nx", "outcome", "iterations",
                 "reference_iterations", "deviation_pct"},
                rows);
}

int run_bench_table(const std::string& raw_id, const std::string& out_dir) {
  const std::string id = canonical_table_id(raw_id);
  const std::string dir = resolve_out_dir(out_dir);
  const std::string path = join(dir, "table_" + id + ".csv");
  if (id == "tidal") {
    auto cells = bench::tidal_refinement_sweep();
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : cells)
      rows.push_back({io::num(c.dx), std::to_string(c.steps),
                      c.diverged ? "diverged" : "completed",
                      io::num(c.depth_l2), io::num(c.reference)});
    io::write_csv(path, {"dx", "steps", "outcome", "depth_l2", "reference"},
                  rows);
    std::printf("wrote %s\n", path.c_str());
    return 0;
  }
  bench::SweepReport rep;
  if (id == "channel-gravity")
    rep = bench::channel_gravity_sweep();
  else if (id == "channel-lambda")
    rep = bench::channel_lambda_sweep();
  else if (id == "expansion-gravity")
    rep = bench::expansion_gravity_sweep();
  else if (id == "expansion-lambda")
    rep = bench::expansion_lambda_sweep();
  else
    throw std::invalid_argument("unknown table id: " + raw_id);
  write_sweep_csv(path, rep);
  for (const auto& c : rep.cells)
    std::printf("  %-10g nx=%-5d %-10s %8ld  (reference %s)\n", c.row_value,
                c.nx, c.converged ? "converged" : "diverged", c.iterations,
                c.reference > 0 ? std::to_string(c.reference).c_str() : "-");
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shallow-water lattice Boltzmann toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (0 = default)");

  // ---- stability ----
  auto* stab = app.add_subcommand("stability", "stability structure checks");
  stab->require_subcommand(1);
  std::string model = "d2q9-salmon";
  double g = 0.0, e = 1.0, hbar = 1.0, tau = 1.0, lambda = 1.0;
  auto* check = stab->add_subcommand("check", "verdict at one point");
  check->add_option("--model", model, "equilibrium family")->required();
  check->add_option("--g", g, "gravitational acceleration")->required();
  check->add_option("--e", e, "lattice link speed")->required();
  check->add_option("--hbar", hbar, "rest depth")->required();
  check->add_option("--tau", tau, "scaled relaxation time")->required();
  check->add_option("--lambda", lambda, "one-parameter family value");

  double g_to = 0.0, l_from = 1.0, l_to = 1.0;
  int g_steps = 1, l_steps = 1;
  std::string scan_out = "stability_scan.csv";
  auto* scn = stab->add_subcommand("scan", "verdict map over (g, lambda)");
  scn->add_option("--model", model, "equilibrium family")->required();
  scn->add_option("--g-from", g, "g range start")->required();
  scn->add_option("--g-to", g_to, "g range end")->required();
  scn->add_option("--g-steps", g_steps, "g sample count")->required();
  scn->add_option("--lambda-from", l_from, "lambda range start");
  scn->add_option("--lambda-to", l_to, "lambda range end");
  scn->add_option("--lambda-steps", l_steps, "lambda sample count");
  scn->add_option("--e", e, "lattice link speed")->required();
  scn->add_option("--hbar", hbar, "rest depth")->required();
  scn->add_option("--tau", tau, "scaled relaxation time")->required();
  scn->add_option("--out", scan_out, "output CSV path");

  // ---- sim ----
  auto* sim = app.add_subcommand("sim", "run a configured case");
  sim->require_subcommand(1);
  std::string config_path, out_dir;
  auto* run = sim->add_subcommand("run", "run a JSON-configured case");
  run->add_option("--config", config_path, "JSON case description")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out-dir", out_dir, "output directory");

  // ---- bench ----
  auto* benchcmd = app.add_subcommand("bench", "canonical benchmark cases");
  benchcmd->require_subcommand(1);
  double g_row = 0.009, dx = 7.0, lam_row = 1.0;
  std::string lattice, table_id;
  auto* hump = benchcmd->add_subcommand("hump", "channel flow over a bump");
  hump->add_option("--g", g_row, "gravity in lattice units (g dx / e^2)");
  hump->add_option("--lattice", lattice, "grid as NXxNY (rows fixed at 50)");
  hump->add_option("--lambda", lam_row, "equilibrium family parameter");
  hump->add_option("--out-dir", out_dir, "output directory");
  auto* tidal = benchcmd->add_subcommand("tidal", "tidal channel flow");
  tidal->add_option("--dx", dx, "lattice spacing in metres (28, 14 or 7)");
  tidal->add_option("--lattice", lattice, "grid as NXxNY (overrides --dx)");
  tidal->add_option("--out-dir", out_dir, "output directory");
  auto* expn = benchcmd->add_subcommand("expansion", "sudden expansion flow");
  double g_row_x = 0.001;
  expn->add_option("--g", g_row_x, "gravity in lattice units (g dx / e^2)");
  expn->add_option("--lambda", lam_row, "equilibrium family parameter");
  expn->add_option("--out-dir", out_dir, "output directory");
  auto* table = benchcmd->add_subcommand("table", "canonical sweep tables");
  table
      ->add_option("id", table_id,
                   "channel-gravity | channel-lambda | tidal | "
                   "expansion-gravity | expansion-lambda (or T1..T5)")
      ->required();
  table->add_option("--out-dir", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (check->parsed())
      return run_stability_check(model, g, e, hbar, tau, lambda);
    if (scn->parsed())
      return run_stability_scan(model, g, g_to, g_steps, l_from, l_to,
                                l_steps, e, hbar, tau, scan_out);
    if (run->parsed()) return run_sim(config_path, out_dir);
    if (hump->parsed())
      return run_bench_hump(g_row, lattice, lam_row, out_dir);
    if (tidal->parsed()) return run_bench_tidal(dx, lattice, out_dir);
    if (expn->parsed())
      return run_bench_expansion(g_row_x, lam_row, out_dir);
    if (table->parsed()) return run_bench_table(table_id, out_dir);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
  return 2;
}
