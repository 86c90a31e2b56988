#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "chernlab/lab.hpp"

using namespace chernlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("chernlab_test_" + name);
  fs::remove_all(p);
  return p;
}

ScenarioConfig small_flat() {
  return parse_config(
      "grid.N = 16\nflow.t_end = 0.002\nflow.snapshots = 2\nflow.cross_check = true\n"
      "monitors.heat_offset = -0.1\n");
}

}  // namespace

TEST_CASE("flat scenario: exit 0 and every verdict PASS") {
  const RunRecord r = run_scenario(small_flat());
  CHECK(r.exit_code == exit_ok);
  CHECK_FALSE(r.broke_down);
  CHECK(r.rows.size() == 3);
  REQUIRE_FALSE(r.monitors.empty());
  for (const auto& m : r.monitors) {
    INFO(m.monitor, " t=", m.t);
    CHECK(m.verdict == Verdict::pass);
  }
  for (const auto& row : r.rows) {
    CHECK(row.min_eig_g == 1.0);
    CHECK(row.max_eig_g == 1.0);
  }
}

TEST_CASE("repeated runs write byte-identical CSVs") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  write_run(run_scenario(small_flat()), a);
  ScenarioConfig nk = parse_config(
      "grid.n = 1\ngrid.N = 16\nmetric.family = kahler_potential\nmetric.amplitude = 0.2\n"
      "flow.t_end = 0.001\nflow.snapshots = 2\n");
  write_run(run_scenario(nk), a / "k");
  write_run(run_scenario(small_flat()), b);
  write_run(run_scenario(nk), b / "k");
  for (const char* f : {"trajectory.csv", "monitors.csv", "certificates.csv", "config.txt", "summary.txt",
                        "k/trajectory.csv", "k/monitors.csv", "k/certificates.csv"}) {
    INFO(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const std::string traj = slurp(a / "trajectory.csv");
  CHECK(traj.rfind("# schema_version=1\nt,min_eig_g,max_eig_g,psi_min,psi_max,psidot_min,psidot_max,"
                   "torsion_sup,dbar_torsion_sup,bk_min,bk_max,kahler_defect,res_psi_evo,res_lambda_evo\n",
                   0) == 0);
  CHECK(slurp(a / "monitors.csv").rfind("# schema_version=1\nmonitor,t,measured,bound,margin,verdict\n", 0) == 0);
  CHECK(parse_config(slurp(a / "config.txt")) == small_flat());
  CHECK(fs::exists(a / "timings.txt"));
}

TEST_CASE("forced instability ends with exit 2 and partial output") {
  const ScenarioConfig c = parse_config(
      "grid.n = 1\ngrid.N = 16\nmetric.family = kahler_potential\nmetric.amplitude = 0.5\n"
      "flow.t_end = 1\nflow.dt = 0.02\nflow.enforce_stability = false\nflow.snapshots = 100\n");
  const RunRecord r = run_scenario(c);
  CHECK(r.exit_code == exit_breakdown);
  CHECK(r.broke_down);
  CHECK(r.breakdown_time > 0.0);
  CHECK(r.breakdown_time < 1.0);
  REQUIRE_FALSE(r.rows.empty());
  CHECK(r.rows.back().t <= r.breakdown_time);
  const auto dir = scratch("breakdown");
  write_run(r, dir);
  CHECK(slurp(dir / "summary.txt").find("breakdown_time") != std::string::npos);
}

TEST_CASE("enforced stability with an oversized step is a runtime error") {
  const ScenarioConfig c = parse_config(
      "grid.n = 1\ngrid.N = 16\nmetric.family = kahler_potential\nflow.t_end = 0.1\nflow.dt = 0.05\n");
  CHECK_THROWS_AS(run_scenario(c), StabilityViolation);
}

TEST_CASE("monitors without a certificate are inapplicable") {
  ScenarioConfig c = small_flat();
  c.certificates.a2.enabled = false;
  c.flow.cross_check = false;
  const RunRecord r = run_scenario(c);
  for (const auto& m : r.monitors)
    if (m.monitor == "trace_bound" || m.monitor == "psidot_lower") CHECK(m.verdict == Verdict::inapplicable);
}

TEST_CASE("output directory resolution") {
  ScenarioConfig c;
  CHECK(output_directory(c, "given") == fs::path("given"));
  setenv("CHERNLAB_OUTPUT_ROOT", "/tmp/root", 1);
  CHECK(output_directory(c, "") == fs::path("/tmp/root") / ("chernlab-" + config_hash(c)));
  c.output_dir = "named";
  CHECK(output_directory(c, "") == fs::path("/tmp/root/named"));
  unsetenv("CHERNLAB_OUTPUT_ROOT");
}

TEST_CASE("write failures name the path") {
  const fs::path bad = "/nonexistent-dir/x/monitors.csv";
  CHECK_THROWS_WITH(write_monitors_csv({}, bad), doctest::Contains("/nonexistent-dir/x/monitors.csv"));
}

TEST_CASE("identity report and certification") {
  const auto rows = identity_report(2, 8, Scheme::spectral, 1);
  bool has_bianchi = false;
  for (const auto& [k, v] : rows) has_bianchi |= k == "bianchi_first";
  CHECK(has_bianchi);
  const auto certs = certify_scenario(small_flat());
  REQUIRE(certs.size() == 3);
  CHECK(certs[0].kind == "a1");
  CHECK(certs[1].kind == "a2");
  CHECK(certs[1].holds);
  CHECK(certs[2].kind == "SB_lower");
}

TEST_CASE("profile export keeps nan outside the support of f") {
  const auto dir = scratch("profile");
  fs::create_directories(dir);
  write_profile_csv(build_profile(0.1, 10000), dir / "profile.csv");
  const std::string text = slurp(dir / "profile.csv");
  CHECK(text.rfind("# schema_version=1\ns,f,phi,F,F1,F2,F3\n", 0) == 0);
  CHECK(text.find("nan") != std::string::npos);
}
