// chernlab: command line front end for the lab.
//
//   chernlab run <config>... [--out dir] [--jobs k] [--scheme spectral|central4]
//   chernlab profile --kappa v [--nodes n] [--sweep] [--out dir]
//   chernlab identities --seed v --n 1|2 --N v [--scheme s] [--out dir]
//   chernlab certify <config> [--out dir] [--scheme s]
//
// Exit codes: 0 done, 1 configuration or runtime error, 2 flow breakdown.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chernlab/lab.hpp"

using namespace chernlab;
namespace fs = std::filesystem;

namespace {

ScenarioConfig load_config(const std::string& path, const std::string& scheme) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  ScenarioConfig c = parse_config(buf.str());
  if (!scheme.empty()) c.grid.scheme = scheme_from_string(scheme);
  return c;
}

fs::path default_root(const std::string& out) {
  if (!out.empty()) return out;
  if (const char* env = std::getenv("CHERNLAB_OUTPUT_ROOT"); env && *env) return env;
  return ".";
}

int run_one(const std::string& path, const std::string& out, const std::string& scheme) {
  try {
    const ScenarioConfig c = load_config(path, scheme);
    const fs::path dir = output_directory(c, out);
    const RunRecord rec = run_scenario(c);
    write_run(rec, dir);
    int fails = 0;
    for (const auto& m : rec.monitors) fails += m.verdict == Verdict::fail;
    fmt::print("{}: {} snapshots, {} monitor rows ({} FAIL) -> {}\n", path, rec.rows.size(),
               rec.monitors.size(), fails, dir.string());
    if (rec.broke_down)
      fmt::print("{}: breakdown at t = {:.6e}: {}\n", path, rec.breakdown_time, rec.breakdown_message);
    return rec.exit_code;
  } catch (const std::exception& e) {
    fmt::print(stderr, "{}: {}\n", path, e.what());
    return exit_error;
  }
}

int combine(int a, int b) {
  if (a == exit_error || b == exit_error) return exit_error;
  return std::max(a, b);
}

int run_command(const std::vector<std::string>& configs, const std::string& out, int jobs,
                const std::string& scheme) {
  auto out_for = [&](const std::string& path) {
    if (out.empty() || configs.size() == 1) return out;
    return (fs::path(out) / fs::path(path).stem()).string();
  };
  int code = exit_ok;
  if (jobs <= 1 || configs.size() == 1) {
    for (const auto& p : configs) code = combine(code, run_one(p, out_for(p), scheme));
    return code;
  }
  // One process per scenario, at most `jobs` alive.
  std::size_t next = 0, running = 0;
  while (next < configs.size() || running > 0) {
    while (running < static_cast<std::size_t>(jobs) && next < configs.size()) {
      std::cout.flush();
      const pid_t pid = fork();
      if (pid < 0) throw std::runtime_error("fork failed");
      if (pid == 0) {
        const int rc = run_one(configs[next], out_for(configs[next]), scheme);
        std::cout.flush();
        std::_Exit(rc);
      }
      ++next;
      ++running;
    }
    int status = 0;
    if (wait(&status) < 0) throw std::runtime_error("wait failed");
    --running;
    code = combine(code, WIFEXITED(status) ? WEXITSTATUS(status) : exit_error);
  }
  return code;
}

int profile_command(double kappa, int nodes, bool sweep, const std::string& out) {
  const CutoffProfile p = build_profile(kappa, nodes);
  const fs::path dir = default_root(out);
  fs::create_directories(dir);
  write_profile_csv(p, dir / "profile.csv");
  const ProfileCheck chk = check_profile(p);
  fmt::print("kappa {} nodes {}: weighted sups {:.6e} {:.6e} {:.6e}, c2 {:.6e}, c3 {:.6e}\n", kappa,
             nodes, chk.weighted_sup[0], chk.weighted_sup[1], chk.weighted_sup[2], chk.c2, chk.c3);
  if (!chk.ok) fmt::print("tau search failed at s = {}: {}\n", chk.failing_s, chk.message);
  if (sweep) {
    const auto reports = completion_sweep(p);
    write_completion_csv(reports, dir / "completion.csv");
    std::vector<double> x, y;
    for (const auto& r : reports) {
      x.push_back(r.rho0);
      y.push_back(r.eps_torsion);
    }
    fmt::print("torsion drift log-log slope {:.4f}\n", loglog_slope(x, y));
  }
  return chk.ok ? exit_ok : exit_error;
}

int identities_command(std::uint64_t seed, int n, int N, const std::string& scheme,
                       const std::string& out) {
  const auto rows = identity_report(n, N, scheme.empty() ? Scheme::spectral : scheme_from_string(scheme), seed);
  const fs::path dir = default_root(out);
  fs::create_directories(dir);
  write_quantities_csv(rows, dir / "identities.csv");
  for (const auto& [name, v] : rows) fmt::print("{:<26} {:.6e}\n", name, v);
  return exit_ok;
}

int certify_command(const std::string& path, const std::string& out, const std::string& scheme) {
  const ScenarioConfig c = load_config(path, scheme);
  const auto rows = certify_scenario(c);
  const fs::path dir = output_directory(c, out);
  fs::create_directories(dir);
  write_certificates_csv(rows, dir / "certificates.csv");
  bool all = true;
  for (const auto& r : rows) {
    fmt::print("{:<9} S={:<10.6g} beta={:<6.3g} {:<22} {:.6e} {}\n", r.kind, r.S, r.beta, r.potential,
               r.measured, r.holds ? "holds" : "fails");
    all = all && r.holds;
  }
  return all ? exit_ok : exit_error;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chern-Ricci flow numerical lab"};
  app.require_subcommand(1);
  std::string out, scheme;
  app.add_option("--out", out, "output directory");
  app.add_option("--scheme", scheme, "derivative scheme override")
      ->check(CLI::IsMember({"spectral", "central4"}));

  auto* run = app.add_subcommand("run", "integrate scenarios and evaluate monitors");
  std::vector<std::string> configs;
  int jobs = 1;
  run->add_option("config", configs, "scenario files")->required()->check(CLI::ExistingFile);
  run->add_option("--jobs", jobs, "parallel scenario processes")->check(CLI::PositiveNumber);

  auto* profile = app.add_subcommand("profile", "tabulate the cutoff profile");
  double kappa = 0.1;
  int nodes = 20000;
  bool sweep = false;
  profile->add_option("--kappa", kappa)->required();
  profile->add_option("--nodes", nodes);
  profile->add_flag("--sweep", sweep, "also run the rho0 completion sweep");

  auto* identities = app.add_subcommand("identities", "identity residuals on a random metric");
  std::uint64_t seed = 1;
  int n = 2, N = 24;
  identities->add_option("--seed", seed)->required();
  identities->add_option("--n", n)->required()->check(CLI::IsMember({1, 2}));
  identities->add_option("--N", N)->required();

  auto* certify = app.add_subcommand("certify", "certificates for the initial metric");
  std::string certify_config;
  certify->add_option("config", certify_config)->required()->check(CLI::ExistingFile);

  for (auto* sub : {run, profile, identities, certify}) {
    sub->add_option("--out", out, "output directory");
    sub->add_option("--scheme", scheme, "derivative scheme override")
        ->check(CLI::IsMember({"spectral", "central4"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_error;
  }

  try {
    if (*run) return run_command(configs, out, jobs, scheme);
    if (*profile) return profile_command(kappa, nodes, sweep, out);
    if (*identities) return identities_command(seed, n, N, scheme, out);
    if (*certify) return certify_command(certify_config, out, scheme);
  } catch (const std::exception& e) {
    fmt::print(stderr, "chernlab: {}\n", e.what());
    return exit_error;
  }
  return exit_error;
}
