// End-to-end checks of the twac binary: artifacts, determinism, exit codes.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

#ifndef TWAC_BIN
#error "TWAC_BIN must point at the CLI binary"
#endif

namespace {

const char* kConfig = R"cfg([run]
seed = 7
output_dir = OUTDIR

[potential]
family = product
well1 = 1 0
well2 = -0.5 0.8660254037844386
well3 = -0.5 -0.8660254037844386
scale = 1

[solver]
grid = 96
R = 10
bc = dirichlet
tol = 2e-3
max_iter = 30000

[partitions]
tensions = 0.5 0.5 0.5
arcs = 90:210:0,210:330:1,330:90:2
deltas = 1e-4 4e-4 1.6e-3
oracle_n = 128

[probe]
trials = 2
amplitude = 0.05
k_lo = -0.3 -0.3
k_hi = 0.3 0.3
)cfg";

struct Sandbox {
  fs::path dir;
  Sandbox(const std::string& name) {
    dir = fs::temp_directory_path() / ("twac_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  std::string config(const std::string& outdir) {
    std::string text = kConfig;
    text.replace(text.find("OUTDIR"), 6, outdir);
    fs::path p = dir / "twac.cfg";
    std::ofstream f(p);
    f << text;
    return p.string();
  }
};

int run(const std::string& args) {
  std::string cmd = std::string(TWAC_BIN) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("angles subcommand writes the 120-degree row") {
  Sandbox sb("angles");
  std::string cfg = sb.config((sb.dir / "out").string());
  CHECK(run("-c " + cfg + " angles") == 0);
  std::string csv = slurp(sb.dir / "out" / "angles.csv");
  CHECK(csv.find("alpha1_deg") == 0);
  CHECK(csv.find("120") != std::string::npos);
  CHECK(fs::exists(sb.dir / "out" / "manifest.txt"));
}

TEST_CASE("compare-partitions reports the half exponent") {
  Sandbox sb("cmp");
  std::string cfg = sb.config((sb.dir / "out").string());
  CHECK(run("-c " + cfg + " compare-partitions") == 0);
  std::string csv = slurp(sb.dir / "out" / "compare_partitions.csv");
  // fitted_exponent column hovers at 0.5
  CHECK(csv.find(",0.5") != std::string::npos);
  CHECK(fs::exists(sb.dir / "out" / "wetted_network.txt"));
}

TEST_CASE("identical config and seed give byte-identical outputs") {
  Sandbox sb("det");
  std::string cfg1 = sb.config((sb.dir / "out1").string());
  CHECK(run("-c " + cfg1 + " partition") == 0);
  std::string cfg2 = sb.config((sb.dir / "out2").string());
  // rewrite with the second outdir (config hash changes, CSV bytes must not)
  {
    std::string text = kConfig;
    text.replace(text.find("OUTDIR"), 6, (sb.dir / "out2").string());
    std::ofstream f(cfg2);
    f << text;
  }
  CHECK(run("-c " + cfg2 + " partition") == 0);
  CHECK(slurp(sb.dir / "out1" / "partition.csv") == slurp(sb.dir / "out2" / "partition.csv"));
  CHECK(slurp(sb.dir / "out1" / "network.txt") == slurp(sb.dir / "out2" / "network.txt"));
}

TEST_CASE("solve writes a readable field and every artifact is in the manifest") {
  Sandbox sb("solve");
  std::string cfg = sb.config((sb.dir / "out").string());
  CHECK(run("-c " + cfg + " solve") == 0);
  CHECK(fs::exists(sb.dir / "out" / "field.twac"));
  CHECK(fs::exists(sb.dir / "out" / "field_labels.pgm"));
  std::string manifest = slurp(sb.dir / "out" / "manifest.txt");
  for (const char* name : {"field.twac", "field_labels.pgm", "solve_summary.csv", "trace.csv"})
    CHECK(manifest.find(name) != std::string::npos);
  // no orphan artifacts: every file in the outdir appears in the manifest
  for (const auto& entry : fs::directory_iterator(sb.dir / "out")) {
    std::string name = entry.path().filename().string();
    if (name == "manifest.txt") continue;
    CHECK(manifest.find(name) != std::string::npos);
  }

  SUBCASE("diagnose and probe consume the field") {
    CHECK(run("-c " + cfg + " diagnose --in " + (sb.dir / "out" / "field.twac").string() +
              " --R 10") == 0);
    CHECK(fs::exists(sb.dir / "out" / "blowdown_summary.txt"));
    CHECK(run("-c " + cfg + " probe --in " + (sb.dir / "out" / "field.twac").string() +
              " --R 10") == 0);
    CHECK(fs::exists(sb.dir / "out" / "probe_summary.csv"));
  }

  SUBCASE("blowdown consumes the field") {
    CHECK(run("-c " + cfg + " blowdown --in " + (sb.dir / "out" / "field.twac").string() +
              " --factor 2 --grid 48") == 0);
    CHECK(fs::exists(sb.dir / "out" / "blowdown.twac"));
  }
}

TEST_CASE("missing config exits 2 and names the path") {
  CHECK(run("-c /nonexistent/twac.cfg angles") == 2);
}

TEST_CASE("malformed config exits 2") {
  Sandbox sb("badcfg");
  fs::path p = sb.dir / "bad.cfg";
  std::ofstream(p) << "[potential\nfamily = product\n";
  CHECK(run("-c " + p.string() + " angles") == 2);
}

TEST_CASE("unknown subcommand exits 64") {
  CHECK(run("frobnicate") == 64);
}

TEST_CASE("hetero and metric write their summaries") {
  Sandbox sb("hm");
  std::string cfg = sb.config((sb.dir / "out").string());
  // smaller profile for test speed
  {
    std::ofstream f(cfg, std::ios::app);
    f << "\n[solver_extra]\n";
  }
  CHECK(run("-c " + cfg + " metric") == 0);
  std::string costs = slurp(sb.dir / "out" / "metric_costs.csv");
  CHECK(costs.find("c12,c13,c23") == 0);
  CHECK(costs.find("1.83") != std::string::npos);
}
