// Acceptance run: one PASS/FAIL line per criterion, then a nonzero exit if any failed.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "chernlab/identities.hpp"
#include "chernlab/lab.hpp"
#include "chernlab/random.hpp"

using namespace chernlab;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

double max_of(const std::array<double, 5>& a) { return *std::max_element(a.begin(), a.end()); }

double identity_residual(const MetricField& g, std::uint64_t seed) {
  const ChernPackage p = chern_package(g);
  return std::max(commutation_residual(p, seed).max(), max_of(bianchi_residuals(p)));
}

// 1. Identity suite.
Outcome identities_suite() {
  Outcome o;
  double worst1 = 0, worst2 = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    worst1 = std::max(worst1, identity_residual(nonkahler_perturbed_metric(ComplexGrid(1, 128), 0.2, seed), seed));
    worst2 = std::max(worst2, identity_residual(nonkahler_perturbed_metric(ComplexGrid(2, 24), 0.2, seed), seed));
  }
  o.require(worst1 <= 1e-7, fmt::format("n=1 N=128 worst residual {:.2e} <= 1e-7", worst1));
  o.require(worst2 <= 1e-7, fmt::format("n=2 N=24 worst residual {:.2e} <= 1e-7", worst2));
  const std::array<int, 3> Ns{16, 24, 32};
  for (int n : {1, 2}) {
    const double order = convergence_order(
        [n](int N) {
          return identity_residual(nonkahler_perturbed_metric(ComplexGrid(n, N, Scheme::central4), 0.2, 1), 1);
        },
        Ns);
    o.require(std::abs(order - 4.0) <= 0.5, fmt::format("central4 order n={} {:.2f} in 4.0 +- 0.5", n, order));
  }
  return o;
}

// 2. Conformal suite.
Outcome conformal_suite() {
  Outcome o;
  const ComplexGrid g(2, 16);
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const MetricField m = nonkahler_perturbed_metric(g, 0.2, seed);
    worst = std::max(worst, conformal_change_residual(m, random_trig_field(g, seed, "conformal_F", 1, 0.1, true)).max());
  }
  o.require(worst <= 1e-8, fmt::format("laws (i)-(iv) worst residual {:.2e} <= 1e-8", worst));
  const double constant =
      conformal_change_residual(nonkahler_perturbed_metric(g, 0.2, 1), Field(g, 1, 0.3)).max();
  o.require(constant <= 1e-12, fmt::format("constant F residual {:.2e} <= 1e-12", constant));
  return o;
}

// Shared trajectories for 3-5.
struct FlowRuns {
  FlowContext kahler1;
  Trajectory metric1, potential1;
  FlowContext flat;
  Trajectory flat_run;
  FlowContext kahler2;
  Trajectory metric2;
};

FlowOptions rk4_options(double t_end) {
  FlowOptions opt;
  opt.integrator = Integrator::rk4;
  opt.t_end = t_end;
  opt.snapshot_times = {t_end / 4, t_end / 2, 3 * t_end / 4};
  return opt;
}

// 3. Two formulations of the flow.
Outcome flow_equivalence(FlowRuns& r) {
  Outcome o;
  const FlowOptions opt = rk4_options(0.05);
  r.metric1 = integrate_metric_flow(r.kahler1, opt);
  r.potential1 = integrate_potential_flow(r.kahler1, opt);
  o.require(!r.metric1.broke_down && !r.potential1.broke_down, "no breakdown");
  const CrossCheck cc = cross_check_formulations(r.kahler1, r.metric1, r.potential1);
  o.require(std::max(cc.reconstruction, cc.formulations) <= 1e-6,
            fmt::format("cross-check {:.2e} / {:.2e} <= 1e-6", cc.reconstruction, cc.formulations));
  double worst_ratio = 0;
  bool ok = true;
  for (const auto& s : r.metric1.snapshots) {
    const QuadratureCheck q = quadrature_check(s);
    ok = ok && q.difference <= 10 * q.estimate;
    if (q.estimate > 0) worst_ratio = std::max(worst_ratio, q.difference / q.estimate);
  }
  o.require(ok, fmt::format("quadrature difference / estimate <= {:.2f} (limit 10)", worst_ratio));
  return o;
}

// 4. Stationarity and Kahler preservation.
Outcome stationarity(FlowRuns& r) {
  Outcome o;
  FlowOptions flat = rk4_options(0.02);
  flat.integrator = Integrator::euler;
  r.flat_run = integrate_metric_flow(r.flat, flat);
  const double drift = metric_drift(r.flat_run);
  o.require(drift <= 1e-10, fmt::format("flat drift {:.2e} <= 1e-10", drift));
  r.metric2 = integrate_metric_flow(r.kahler2, rk4_options(0.02));
  o.require(!r.metric2.broke_down, "no breakdown");
  double defect = 0;
  for (const auto& s : r.metric2.snapshots) defect = std::max(defect, kahler_defect(s.g));
  o.require(defect <= 1e-6, fmt::format("n=2 Kahler defect {:.2e} <= 1e-6", defect));
  return o;
}

// 5. Evolution identities and the hard inequality along the runs of 3-4.
Outcome evolution_identities(const FlowRuns& r) {
  Outcome o;
  double res = 0, comb = -1e300;
  const std::array<std::pair<const FlowContext*, const Trajectory*>, 3> runs{
      std::pair{&r.kahler1, &r.metric1}, {&r.flat, &r.flat_run}, {&r.kahler2, &r.metric2}};
  for (const auto& [ctx, traj] : runs) {
    const double S1 = traj->snapshots.back().t;
    for (const auto& s : traj->snapshots) {
      res = std::max({res, evolution_residual_psi(*ctx, s), evolution_residual_lambda(*ctx, s, S1)});
      for (double v : real_values(psi_combination(s))) comb = std::max(comb, v);
    }
  }
  o.require(res <= 1e-5, fmt::format("evolution residuals {:.2e} <= 1e-5", res));
  o.require(comb <= 1e-6, fmt::format("sup (t psidot - psi - n t) {:.2e} <= 1e-6", comb));
  return o;
}

// 6. Maximum principle cases.
Outcome max_principle_cases() {
  Outcome o;
  const ComplexGrid g(1, 32);
  const FlowContext ctx(kahler_potential_metric(g, 0.2, 3, 1));
  FlowOptions opt = rk4_options(0.02);
  auto verdict = [&](double offset, double amp) {
    const Field f0 = sample(g, [=](const std::array<double, 4>& x) {
      return cplx(offset + amp * std::sin(2 * pi * x[0]), 0.0);
    });
    return max_principle_monitor(heat_coevolve(ctx, f0, opt).samples, 1e-8);
  };
  const auto c1 = verdict(-1.0, 0.0);
  const auto literal = verdict(-1.0, 0.5);
  const auto c2 = verdict(-0.1, 0.5);
  const auto c3 = verdict(-0.1, 0.05);
  o.require(c1.verdict == Verdict::pass, "f = -1: " + to_string(c1.verdict));
  o.require(c2.verdict == Verdict::inapplicable,
            "f0 = -0.1 + 0.5 sin (positive at t = 0): " + to_string(c2.verdict));
  o.require(c3.verdict == Verdict::pass && c3.sup_f <= 1e-8,
            fmt::format("f0 = -0.1 + 0.05 sin: {} sup f {:.3e}", to_string(c3.verdict), c3.sup_f));
  o.detail += "; literal f0 = -1 + 0.5 sin is nonpositive and gives " + to_string(literal.verdict);
  return o;
}

// 7. Certificates.
Outcome certificates() {
  Outcome o;
  const ComplexGrid g2(2, 16);
  const Certificate flat = certify_a2(flat_metric(g2), 1.0, Field(g2, 1), 1.0);
  o.require(flat.holds && flat.measured_margin >= -1e-12,
            fmt::format("flat a2 margin {:.2e} >= -1e-12", flat.measured_margin));
  const ComplexGrid g(1, 64);
  const MetricField m = conformal_exponential_metric(
      sample(g, [](const std::array<double, 4>& x) { return cplx(0.1 * std::sin(2 * pi * x[0]), 0.0); }));
  const double beta = 0.5;
  const CertificateMargin margin(m, Field(g, 1), beta);
  double scan = 0.0;
  for (int k = 0; k <= 100000; ++k) {
    const double S = 1e-4 * k;
    if (margin(S) < -certificate_tolerance) break;
    scan = S;
  }
  const std::vector<Field> family{Field(g, 1)};
  const SBEstimate sb = estimate_SB_lower(m, family, beta, 10.0);
  o.require(std::abs(sb.S - scan) <= 1e-3, fmt::format("S_B bisection {:.6f} vs scan {:.6f}", sb.S, scan));
  return o;
}

// 8. Cutoff profile and completion.
Outcome cutoff() {
  Outcome o;
  const CutoffProfile p = build_profile(0.1, 20000);
  bool zero = true;
  for (std::size_t i = 0; i < p.s.size(); ++i)
    if (p.s[i] <= p.a && p.F[i] != 0.0) zero = false;
  o.require(zero, "P = 0 on nodes in [0, 1 - kappa + kappa^2]");
  const ProfileCheck a = check_profile(p), b = check_profile(build_profile(0.1, 40000));
  double drift = 0;
  bool finite = true;
  for (int k = 0; k < 3; ++k) {
    finite = finite && std::isfinite(a.weighted_sup[k]);
    drift = std::max(drift, std::abs(b.weighted_sup[k] / a.weighted_sup[k] - 1));
  }
  o.require(finite && drift <= 0.01, fmt::format("weighted sups change {:.2e} under node doubling", drift));
  const auto sweep = completion_sweep(p);
  std::vector<double> x, y;
  bool decreasing = true;
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    x.push_back(sweep[k].rho0);
    y.push_back(sweep[k].eps_torsion);
    if (k > 0 && !(sweep[k].eps_measured < sweep[k - 1].eps_measured)) decreasing = false;
  }
  const double slope = loglog_slope(x, y);
  o.require(decreasing, fmt::format("eps_measured {:.3e} {:.3e} {:.3e} decreasing", sweep[0].eps_measured,
                                    sweep[1].eps_measured, sweep[2].eps_measured));
  o.require(slope >= -1.3 && slope <= -0.7, fmt::format("torsion drift slope {:.3f} in [-1.3, -0.7]", slope));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// 9. Determinism.
Outcome determinism() {
  Outcome o;
  const ScenarioConfig c = parse_config(
      "grid.n = 1\ngrid.N = 32\nmetric.family = kahler_potential\nmetric.amplitude = 0.2\n"
      "flow.integrator = rk4\nflow.t_end = 0.005\nflow.snapshots = 4\nflow.cross_check = true\n");
  const ScenarioConfig c2 = parse_config(
      "grid.n = 2\ngrid.N = 12\nmetric.family = nonkahler_perturbed\nmetric.epsilon = 0.2\n"
      "flow.t_end = 0.002\nflow.snapshots = 2\n");
  const fs::path root = fs::temp_directory_path() / "chernlab_acceptance";
  fs::remove_all(root);
  std::size_t compared = 0;
  bool same = true;
  for (const auto* cfg : {&c, &c2}) {
    const std::string tag = config_hash(*cfg);
    write_run(run_scenario(*cfg), root / "a" / tag);
    write_run(run_scenario(*cfg), root / "b" / tag);
  }
  const CutoffProfile p = build_profile(0.1);
  for (const char* side : {"a", "b"}) {
    write_profile_csv(p, root / side / "profile.csv");
    write_completion_csv(completion_sweep(build_profile(0.1)), root / side / "completion.csv");
  }
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
    const fs::path other = root / "b" / fs::relative(e.path(), root / "a");
    same = same && slurp(e.path()) == slurp(other);
    ++compared;
  }
  o.require(same && compared == 8, fmt::format("{} CSV pairs byte-identical", compared));
  return o;
}

}  // namespace

int main() {
  const ComplexGrid g1(1, 128), g0(2, 16), g2(2, 24);
  FlowRuns runs{FlowContext(kahler_potential_metric(g1, 0.1, 1, 1)), {}, {}, FlowContext(flat_metric(g0)), {},
                FlowContext(kahler_potential_metric(g2, 0.1, 1, 1)), {}};

  struct Criterion {
    int id;
    const char* name;
    double limit;  // seconds, 0 for none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "identity suite", 120, identities_suite},
      {2, "conformal suite", 60, conformal_suite},
      {3, "flow equivalence", 120, [&] { return flow_equivalence(runs); }},
      {4, "stationarity and Kahler preservation", 300, [&] { return stationarity(runs); }},
      {5, "evolution identities along trajectories", 0, [&] { return evolution_identities(runs); }},
      {6, "maximum principle monitor", 0, max_principle_cases},
      {7, "certificates", 0, certificates},
      {8, "cutoff", 120, cutoff},
      {9, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double sec = std::chrono::duration<double>(Clock::now() - t0).count();
    if (c.limit > 0) o.require(sec <= c.limit, fmt::format("runtime {:.1f} s <= {:.0f} s", sec, c.limit));
    else o.detail += fmt::format("; runtime {:.1f} s", sec);
    fmt::print("criterion {} {}: {}: {}\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
