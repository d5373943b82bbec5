// twac: experiment runner for the triple-well Allen-Cahn toolkit.
//
// Subcommands: hetero, metric, angles, solve, blowdown, diagnose, partition,
// compare-partitions, probe. Each reads a structured-text config, writes its
// artifacts plus a manifest into the output directory, and exits 0 on
// success, 2 on validation/parse failure, 3 on convergence failure, 64 on
// usage errors.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "twac/config.hpp"
#include "twac/diagnostics.hpp"
#include "twac/errors.hpp"
#include "twac/field.hpp"
#include "twac/geodesics.hpp"
#include "twac/junction.hpp"
#include "twac/partitions.hpp"
#include "twac/potential.hpp"
#include "twac/solver.hpp"

namespace fs = std::filesystem;
using namespace twac;

namespace {

constexpr const char* kVersion = "twac 0.1.0";

struct RunContext {
  Config cfg;
  std::string cfg_text;
  fs::path out_dir;
  unsigned long long seed = 1;
  int threads = 0;
  std::vector<std::string> artifacts;

  void write_text(const std::string& name, const std::string& text) {
    fs::create_directories(out_dir);
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw ValidationError("cannot write artifact: " + (out_dir / name).string());
    f << text;
    artifacts.push_back(name);
  }

  void note_artifact(const std::string& name) { artifacts.push_back(name); }

  void write_manifest() {
    std::ostringstream m;
    m << "[manifest]\n";
    m << "version = " << kVersion << '\n';
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(cfg_text)));
    m << "config_hash = " << hash << '\n';
    m << "seed = " << seed << '\n';
    for (const auto& a : artifacts) m << "file = " << a << '\n';
    fs::create_directories(out_dir);
    std::ofstream f(out_dir / "manifest.txt", std::ios::binary);
    f << m.str();
  }
};

RunContext load_context(const std::string& cfg_path, const std::string& out_override) {
  RunContext ctx;
  std::ifstream f(cfg_path, std::ios::binary);
  if (!f) throw ValidationError("missing config file: " + cfg_path);
  std::ostringstream ss;
  ss << f.rdbuf();
  ctx.cfg_text = ss.str();
  ctx.cfg = Config::parse(ctx.cfg_text);
  ctx.out_dir = out_override.empty() ? ctx.cfg.get_or("run", "output_dir", "out") : out_override;
  ctx.seed = static_cast<unsigned long long>(ctx.cfg.get_int_or("run", "seed", 1));
  ctx.threads = static_cast<int>(ctx.cfg.get_int_or("run", "threads", 0));
  if (ctx.threads == 0) {
    if (const char* env = std::getenv("TWAC_THREADS")) ctx.threads = std::atoi(env);
  }
  return ctx;
}

BoundaryData boundary_from_config(const Config& cfg) {
  // arcs = start:end:label[,start:end:label...] in degrees
  std::string spec = cfg.get_or("partitions", "arcs", "90:210:0,210:330:1,330:90:2");
  BoundaryData b;
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    double a0, a1;
    int label;
    if (std::sscanf(tok.c_str(), "%lf:%lf:%d", &a0, &a1, &label) != 3)
      throw ValidationError("bad arc spec: " + tok);
    double s = a0 * pi() / 180.0, e = a1 * pi() / 180.0;
    while (e <= s) e += 2.0 * pi();
    b.arcs.push_back({s, e, label});
  }
  b.validate();
  return b;
}

SurfaceTensions tensions_from_config(const Config& cfg, const Potential& pot) {
  std::string spec = cfg.get_or("partitions", "tensions", "from_potential");
  if (spec == "from_potential") {
    PairwiseCosts c = pairwise_costs(pot);
    return surface_tensions(c.c12, c.c13, c.c23);
  }
  std::istringstream in(spec);
  double t1, t2, t3;
  if (!(in >> t1 >> t2 >> t3)) throw ValidationError("bad tensions spec: " + spec);
  return SurfaceTensions::from_tensions(t1, t2, t3);
}

PairwiseCosts costs_from_config(const Config& cfg, const Potential& pot) {
  if (cfg.has("partitions", "costs")) {
    auto v = cfg.get_doubles("partitions", "costs");
    if (v.size() != 3) throw ValidationError("costs needs three values");
    PairwiseCosts c;
    c.c12 = v[0];
    c.c13 = v[1];
    c.c23 = v[2];
    c.margin = 0.0;
    c.strict_triangle = true;
    return c;
  }
  if (cfg.has("partitions", "tensions") &&
      cfg.get("partitions", "tensions") != "from_potential") {
    SurfaceTensions t = tensions_from_config(cfg, pot);
    PairwiseCosts c;
    c.c12 = t.c12;
    c.c13 = t.c13;
    c.c23 = t.c23;
    c.strict_triangle = true;
    return c;
  }
  return pairwise_costs(pot);
}

std::string trace_to_csv(const TraceData& t) {
  std::ostringstream out;
  out << "theta,u1,u2\n";
  out << "# R = " << format_double(t.R) << " radius = " << format_double(t.radius) << '\n';
  for (std::size_t k = 0; k < t.theta.size(); ++k)
    out << format_double(t.theta[k]) << ',' << format_double(t.value[k].x) << ','
        << format_double(t.value[k].y) << '\n';
  return out.str();
}

TraceData trace_from_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open trace file: " + path);
  TraceData t;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::sscanf(line.c_str(), "# R = %lf radius = %lf", &t.R, &t.radius);
      continue;
    }
    double th, x, y;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &th, &x, &y) != 3)
      throw ValidationError("bad trace line: " + line);
    t.theta.push_back(th);
    t.value.push_back({x, y});
  }
  if (t.theta.size() < 16) throw ValidationError("trace file too short");
  return t;
}

// ----------------------------------------------------------- subcommand runs

void run_hetero(RunContext& ctx) {
  Potential pot = Potential::from_config(ctx.cfg);
  double T = ctx.cfg.get_double_or("solver", "hetero_T", 12.0);
  int n = static_cast<int>(ctx.cfg.get_int_or("solver", "hetero_n", 2048));
  std::ostringstream summary;
  summary << "pair,energy,decay_rate,first_integral_dev,ode_residual\n";
  for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}}) {
    HeteroclinicProfile prof = heteroclinic(pot, i, j, T, n);
    prof.decay_rate = decay_rate(pot, prof);
    std::string name = "hetero_" + std::to_string(i + 1) + std::to_string(j + 1) + ".csv";
    fs::create_directories(ctx.out_dir);
    write_profile_csv(pot, prof, (ctx.out_dir / name).string());
    ctx.note_artifact(name);
    summary << i + 1 << j + 1 << ',' << format_double(prof.energy) << ','
            << format_double(prof.decay_rate) << ','
            << format_double(prof.max_first_integral_dev) << ','
            << format_double(prof.ode_residual) << '\n';
  }
  ctx.write_text("hetero_summary.csv", summary.str());
}

void run_metric(RunContext& ctx) {
  Potential pot = Potential::from_config(ctx.cfg);
  int n = static_cast<int>(ctx.cfg.get_int_or("solver", "path_n", 192));
  PairwiseCosts c = pairwise_costs(pot, n);
  ValidationReport rep = validate(pot);
  fill_triangle_status(rep, c);
  std::ostringstream out;
  out << "c12,c13,c23,triangle_margin,strict\n";
  out << format_double(c.c12) << ',' << format_double(c.c13) << ',' << format_double(c.c23)
      << ',' << format_double(c.margin) << ',' << (c.strict_triangle ? 1 : 0) << '\n';
  ctx.write_text("metric_costs.csv", out.str());
  ctx.write_text("validation.txt", rep.summary() + "\n");
}

void run_angles(RunContext& ctx) {
  Potential pot = Potential::from_config(ctx.cfg);
  PairwiseCosts c = costs_from_config(ctx.cfg, pot);
  auto a = junction_angles(c.c12, c.c13, c.c23);
  SurfaceTensions t = surface_tensions(c.c12, c.c13, c.c23);
  std::ostringstream out;
  out << "alpha1_deg,alpha2_deg,alpha3_deg,t1,t2,t3\n";
  out << format_double(a[0] * 180.0 / pi()) << ',' << format_double(a[1] * 180.0 / pi()) << ','
      << format_double(a[2] * 180.0 / pi()) << ',' << format_double(t.t1) << ','
      << format_double(t.t2) << ',' << format_double(t.t3) << '\n';
  ctx.write_text("angles.csv", out.str());
}

struct SolveFlags {
  int grid = 0;
  double R = 0.0;
  std::string bc, trace, out;
  double tol = 0.0;
  long max_iter = 0;
};

void run_solve(RunContext& ctx, const SolveFlags& flags) {
  Potential pot = Potential::from_config(ctx.cfg);
  int grid = flags.grid ? flags.grid : static_cast<int>(ctx.cfg.get_int_or("solver", "grid", 256));
  double R = flags.R ? flags.R : ctx.cfg.get_double_or("solver", "R", 32.0);
  std::string bc = !flags.bc.empty() ? flags.bc : ctx.cfg.get_or("solver", "bc", "dirichlet");
  RelaxOptions opts;
  opts.tol = flags.tol ? flags.tol : ctx.cfg.get_double_or("solver", "tol", 5e-4);
  opts.max_iter = flags.max_iter ? flags.max_iter : ctx.cfg.get_int_or("solver", "max_iter", 40000);
  opts.threads = ctx.threads;

  GridSpec spec = GridSpec::square(grid, 1.0, DomainShape::disc);
  Field init;
  double m0 = 0.0;
  TraceData trace;
  if (bc == "dirichlet") {
    BoundaryData bdata = boundary_from_config(ctx.cfg);
    SurfaceTensions tensions = tensions_from_config(ctx.cfg, pot);
    PartitionNetwork net = solve_problem1(bdata, tensions);
    m0 = net.cost;
    init = sample_map(net, pot, spec);
    trace = flags.trace.empty() ? build_trace(bdata, pot, R) : trace_from_csv(flags.trace);
    apply_trace(init, trace);
    ctx.write_text("trace.csv", trace_to_csv(trace));
  } else if (bc == "neumann") {
    PairwiseCosts c = costs_from_config(ctx.cfg, pot);
    auto angles = junction_angles(c.c12, c.c13, c.c23);
    JunctionMap map = make_junction_map(angles, pi() / 2.0, {0, 1, 2});
    init = sample_map(map, pot, spec);
    init.bc = BcKind::neumann;
  } else {
    throw ValidationError("solve: bc must be neumann or dirichlet");
  }

  RelaxInfo info;
  Field relaxed = relax(init, pot, R, opts, &info);

  std::string out_name = flags.out.empty() ? "field.twac" : flags.out;
  fs::create_directories(ctx.out_dir);
  write_field(relaxed, (ctx.out_dir / out_name).string());
  ctx.note_artifact(out_name);
  write_label_pgm(relaxed, pot, (ctx.out_dir / "field_labels.pgm").string());
  ctx.note_artifact("field_labels.pgm");

  std::ostringstream out;
  out << "grid,R,bc,E_R,m0,iterations,residual\n";
  out << grid << ',' << format_double(R) << ',' << bc << ',' << format_double(info.final_energy)
      << ',' << format_double(m0) << ',' << info.iterations << ',' << format_double(info.residual)
      << '\n';
  ctx.write_text("solve_summary.csv", out.str());
}

void run_blowdown(RunContext& ctx, const std::string& in, double factor, int grid) {
  Field src = read_field(in);
  double extent = 0.5 * (src.nx - 1) * src.spacing / factor;
  GridSpec spec = GridSpec::square(grid ? grid : src.nx, extent, src.domain);
  Field out = blowdown(src, factor, spec);
  fs::create_directories(ctx.out_dir);
  write_field(out, (ctx.out_dir / "blowdown.twac").string());
  ctx.note_artifact("blowdown.twac");
}

void run_diagnose(RunContext& ctx, const std::string& in, double R) {
  Potential pot = Potential::from_config(ctx.cfg);
  Field f = read_field(in);
  if (R <= 0.0) R = ctx.cfg.get_double_or("solver", "R", 32.0);
  Field U = f.rescaled(R);  // interpret the unit-disc solve at blowup scale

  std::vector<double> radii = ctx.cfg.has("diagnostics", "radii")
                                  ? ctx.cfg.get_doubles("diagnostics", "radii")
                                  : std::vector<double>{R / 8, R / 4, R / 2, 0.95 * R};
  PairwiseCosts c = costs_from_config(ctx.cfg, pot);
  BlowdownReport rep = classify_blowdown(U, pot, c, radii);
  ctx.write_text("blowdown_report.csv", rep.to_csv());
  ctx.write_text("blowdown_summary.txt", rep.summary().serialize());
  if (rep.junction_fit) {
    Field best = sample_map(*rep.junction_fit, pot, U.spec());
    fs::create_directories(ctx.out_dir);
    write_label_pgm(best, pot, (ctx.out_dir / "best_fit.pgm").string());
    ctx.note_artifact("best_fit.pgm");
  }

  double rho = ctx.cfg.get_double_or("diagnostics", "rho", 0.9 * R);
  CircleProfile prof = circle_profile(U, pot, rho);
  std::ostringstream circ;
  circ << "theta,u1,u2,W\n";
  for (std::size_t k = 0; k < prof.theta.size(); ++k)
    circ << format_double(prof.theta[k]) << ',' << format_double(prof.value[k].x) << ','
         << format_double(prof.value[k].y) << ',' << format_double(pot.eval(prof.value[k]))
         << '\n';
  ctx.write_text("circle_profile.csv", circ.str());

  std::ostringstream sum;
  sum << "full_circle_energy,cost_sum,pohozaev_residual_at_half_R\n";
  sum << format_double(prof.full_energy) << ',' << format_double(c.c12 + c.c13 + c.c23) << ','
      << format_double(pohozaev_residual(U, pot, R / 2.0)) << '\n';
  ctx.write_text("diagnose_summary.csv", sum.str());
}

void run_partition(RunContext& ctx) {
  Potential pot = Potential::from_config(ctx.cfg);
  BoundaryData bdata = boundary_from_config(ctx.cfg);
  SurfaceTensions tensions = tensions_from_config(ctx.cfg, pot);
  PartitionNetwork net = solve_problem1(bdata, tensions);
  ctx.write_text("network.txt", net.to_config().serialize());
  ctx.write_text("network_paths.txt", net.to_path_list());

  long oracle_n = ctx.cfg.get_int_or("partitions", "oracle_n", 0);
  double oracle = 0.0;
  if (oracle_n > 0)
    oracle = multiway_cut_oracle(bdata, tensions, static_cast<int>(oracle_n), ctx.seed);

  std::ostringstream out;
  out << "m0,oracle,angle_residual\n";
  out << format_double(net.cost) << ',' << format_double(oracle) << ','
      << format_double(junction_angle_residual(net, tensions)) << '\n';
  ctx.write_text("partition.csv", out.str());

  GridSpec spec = GridSpec::square(512, 1.0, DomainShape::disc);
  Field labels = sample_map(net, pot, spec);
  fs::create_directories(ctx.out_dir);
  write_label_pgm(labels, pot, (ctx.out_dir / "partition_labels.pgm").string());
  ctx.note_artifact("partition_labels.pgm");
}

void run_compare_partitions(RunContext& ctx) {
  Potential pot = Potential::from_config(ctx.cfg);
  BoundaryData bdata = boundary_from_config(ctx.cfg);
  SurfaceTensions tensions = tensions_from_config(ctx.cfg, pot);
  std::vector<double> deltas = ctx.cfg.has("partitions", "deltas")
                                   ? ctx.cfg.get_doubles("partitions", "deltas")
                                   : std::vector<double>{1e-4, 4e-4, 1.6e-3, 6.4e-3};
  ComparisonTable table = compare_partitions(bdata, tensions, deltas);
  ctx.write_text("compare_partitions.csv", table.to_csv());
  WettedNetwork wet = solve_problem2(bdata, tensions, deltas.back());
  ctx.write_text("wetted_network.txt", wet.to_config().serialize());
  ctx.write_text("wetted_paths.txt", wet.to_path_list());
}

void run_probe(RunContext& ctx, const std::string& in, double R) {
  Potential pot = Potential::from_config(ctx.cfg);
  Field f = read_field(in);
  if (R <= 0.0) R = ctx.cfg.get_double_or("solver", "R", 32.0);
  Rect K;
  auto lo = ctx.cfg.has("probe", "k_lo") ? ctx.cfg.get_doubles("probe", "k_lo")
                                         : std::vector<double>{-0.35, -0.35};
  auto hi = ctx.cfg.has("probe", "k_hi") ? ctx.cfg.get_doubles("probe", "k_hi")
                                         : std::vector<double>{0.35, 0.35};
  K.lo = {lo[0], lo[1]};
  K.hi = {hi[0], hi[1]};
  int trials = static_cast<int>(ctx.cfg.get_int_or("probe", "trials", 8));
  double amplitude = ctx.cfg.get_double_or("probe", "amplitude", 0.1);
  RelaxOptions opts;
  opts.tol = ctx.cfg.get_double_or("solver", "tol", 5e-4);
  opts.threads = ctx.threads;
  ProbeReport rep = local_min_probe(f, pot, R, K, trials, amplitude, ctx.seed, opts);
  std::ostringstream out;
  out << "trial,delta\n";
  for (std::size_t k = 0; k < rep.deltas.size(); ++k)
    out << k << ',' << format_double(rep.deltas[k]) << '\n';
  ctx.write_text("probe.csv", out.str());
  std::ostringstream sum;
  sum << "min_delta,area,base_energy\n";
  sum << format_double(rep.min_delta) << ',' << format_double(rep.area) << ','
      << format_double(rep.base_energy) << '\n';
  ctx.write_text("probe_summary.csv", sum.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"triple-well Allen-Cahn toolkit"};
  app.require_subcommand(1);

  std::string cfg_path = "twac.cfg";
  std::string out_dir;
  int threads = 0;
  app.add_option("-c,--config", cfg_path, "config file (structured text)");
  app.add_option("--out-dir", out_dir, "output directory (overrides config)");
  app.add_option("--threads", threads, "worker threads (or TWAC_THREADS)");

  auto* cmd_hetero = app.add_subcommand("hetero", "heteroclinic profiles and decay rates");
  auto* cmd_metric = app.add_subcommand("metric", "pairwise geodesic costs");
  auto* cmd_angles = app.add_subcommand("angles", "junction angles and tensions");

  SolveFlags sf;
  auto* cmd_solve = app.add_subcommand("solve", "relax the Allen-Cahn system on a disc");
  cmd_solve->add_option("--grid", sf.grid, "grid nodes per side");
  cmd_solve->add_option("--R", sf.R, "scale parameter R");
  cmd_solve->add_option("--bc", sf.bc, "neumann or dirichlet");
  cmd_solve->add_option("--trace", sf.trace, "trace CSV to impose (dirichlet)");
  cmd_solve->add_option("--tol", sf.tol, "residual tolerance");
  cmd_solve->add_option("--max-iter", sf.max_iter, "sweep budget");
  cmd_solve->add_option("--out", sf.out, "output field name");

  std::string in_path;
  double factor = 2.0;
  int bd_grid = 0;
  auto* cmd_blowdown = app.add_subcommand("blowdown", "rescale a field by U(Rx)");
  cmd_blowdown->add_option("--in", in_path, "input field")->required();
  cmd_blowdown->add_option("--factor", factor, "blowdown factor R");
  cmd_blowdown->add_option("--grid", bd_grid, "target grid nodes");

  std::string diag_in;
  double diag_R = 0.0;
  auto* cmd_diag = app.add_subcommand("diagnose", "blowdown diagnostics on a relaxed field");
  cmd_diag->add_option("--in", diag_in, "input field")->required();
  cmd_diag->add_option("--R", diag_R, "scale the unit-disc field was relaxed at");

  auto* cmd_part = app.add_subcommand("partition", "solve the sharp partition problem");
  auto* cmd_cmp = app.add_subcommand("compare-partitions", "delta sweep of the wetted problem");

  std::string probe_in;
  double probe_R = 0.0;
  auto* cmd_probe = app.add_subcommand("probe", "local-minimality perturbation probe");
  cmd_probe->add_option("--in", probe_in, "input field")->required();
  cmd_probe->add_option("--R", probe_R, "scale parameter R");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 64;
  }

  try {
    RunContext ctx = load_context(cfg_path, out_dir);
    if (threads > 0) ctx.threads = threads;
    if (cmd_hetero->parsed()) run_hetero(ctx);
    if (cmd_metric->parsed()) run_metric(ctx);
    if (cmd_angles->parsed()) run_angles(ctx);
    if (cmd_solve->parsed()) run_solve(ctx, sf);
    if (cmd_blowdown->parsed()) run_blowdown(ctx, in_path, factor, bd_grid);
    if (cmd_diag->parsed()) run_diagnose(ctx, diag_in, diag_R);
    if (cmd_part->parsed()) run_partition(ctx);
    if (cmd_cmp->parsed()) run_compare_partitions(ctx);
    if (cmd_probe->parsed()) run_probe(ctx, probe_in, probe_R);
    ctx.write_manifest();
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << '\n';
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "parse error";
    if (e.line >= 0) std::cerr << " (line " << e.line << ")";
    std::cerr << " at byte " << e.byte_offset << ": " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
