#include "chernlab/lab.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>

#include "chernlab/identities.hpp"
#include "chernlab/random.hpp"

namespace chernlab {

MetricField build_metric(const ScenarioConfig& c) {
  const ComplexGrid grid(c.grid.n, c.grid.N, c.grid.scheme);
  const auto& m = c.metric;
  switch (m.family) {
    case MetricFamily::flat:
      return flat_metric(grid);
    case MetricFamily::kahler_potential:
      return kahler_potential_metric(grid, m.amplitude, m.seed, m.kmax);
    case MetricFamily::nonkahler_perturbed:
      return nonkahler_perturbed_metric(grid, m.epsilon, m.seed, m.kmax);
    case MetricFamily::conformal_radial: {
      const CutoffProfile profile = build_profile(m.kappa);
      Field rho = centered_exhaustion(grid);
      rho *= m.radius;
      const Completion done = conformal_completion(flat_metric(grid), rho, m.rho0, profile);
      if (done.report.outside_points + done.report.ceiling_points > 0)
        throw std::runtime_error("conformal_radial metric is not defined on the whole chart");
      return MetricField(done.h0);
    }
  }
  throw std::logic_error("unhandled metric family");
}

Field build_potential(const ComplexGrid& grid, const std::string& spec) {
  if (spec == "zero") return Field(grid, 1);
  if (spec.rfind("trig:", 0) == 0) {
    const auto colon = spec.find(':', 5);
    if (colon != std::string::npos) {
      const auto seed = std::stoull(spec.substr(5, colon - 5));
      const double amp = std::stod(spec.substr(colon + 1));
      return random_trig_field(grid, seed, "potential", 1, amp, true, Weight::hessian);
    }
  }
  throw std::invalid_argument("unknown potential '" + spec + "'");
}

TrajectoryRow trajectory_row(const FlowContext& ctx, const Snapshot& s, double S1,
                             const BkOptions& bk) {
  const ChernPackage pkg = chern_package(s.g);
  const BkExtrema ex = bk_extrema(pkg, bk);
  const auto eig = eigen_extent(s.g.field());
  const auto psi = real_values(s.psi);
  const auto psidot = real_values(s.psidot);
  TrajectoryRow r;
  r.t = s.t;
  r.min_eig_g = eig.min;
  r.max_eig_g = eig.max;
  r.psi_min = *std::min_element(psi.begin(), psi.end());
  r.psi_max = *std::max_element(psi.begin(), psi.end());
  r.psidot_min = *std::min_element(psidot.begin(), psidot.end());
  r.psidot_max = *std::max_element(psidot.begin(), psidot.end());
  r.torsion_sup = pkg.torsion_sup;
  r.dbar_torsion_sup = pkg.dbar_torsion_sup;
  r.bk_min = ex.min;
  r.bk_max = ex.max;
  r.kahler_defect = kahler_defect(s.g);
  r.res_psi_evo = evolution_residual_psi(ctx, s);
  r.res_lambda_evo = evolution_residual_lambda(ctx, s, S1);
  return r;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

MonitorRecord upper_record(std::string name, double t, double measured, double bound) {
  return {std::move(name), t, measured, bound, bound - measured,
          measured <= bound ? Verdict::pass : Verdict::fail};
}

struct CertificateSet {
  std::vector<CertificateRow> rows;
  std::optional<Certificate> a2;  // first holding a2 certificate, else the first computed
};

CertificateSet compute_certificates(const ScenarioConfig& c, const MetricField& g0) {
  CertificateSet out;
  const auto& grid = g0.grid();
  for (const auto* spec : {&c.certificates.a2, &c.certificates.a3}) {
    if (!spec->enabled) continue;
    const bool lower = spec == &c.certificates.a2;
    std::vector<Field> family;
    for (const auto& name : spec->potentials) {
      family.push_back(build_potential(grid, name));
      const Certificate cert = lower ? certify_a2(g0, spec->S, family.back(), spec->beta)
                                     : certify_a3(g0, spec->S, family.back(), spec->beta);
      out.rows.push_back({to_string(cert.kind), cert.S, cert.beta, name, cert.measured_margin,
                          cert.holds, fmt::format("argmin point {}", cert.argmin)});
      if (lower && (!out.a2 || (!out.a2->holds && cert.holds))) out.a2 = cert;
    }
    if (lower) {
      const SBEstimate sb = estimate_SB_lower(g0, family, spec->beta, c.certificates.S_max);
      out.rows.push_back({"SB_lower", sb.S, spec->beta, spec->potentials[sb.potential], sb.S,
                          sb.S > 0.0, sb.diagnostic});
    }
  }
  return out;
}

}  // namespace

std::vector<CertificateRow> certify_scenario(const ScenarioConfig& c) {
  const MetricField g0 = build_metric(c);
  std::vector<CertificateRow> rows;
  const A1Report a1 = certify_a1(centered_exhaustion(g0.grid()), g0);
  rows.push_back({"a1", 0.0, 0.0, "centered_exhaustion", a1.gradient_sup, true,
                  fmt::format("sup |ddbar rho| = {:.12e}; compact chart", a1.hessian_sup)});
  auto certs = compute_certificates(c, g0);
  rows.insert(rows.end(), certs.rows.begin(), certs.rows.end());
  return rows;
}

RunRecord run_scenario(const ScenarioConfig& c) {
  RunRecord rec;
  rec.config_text = emit_config(c);
  rec.config_hash = config_hash(c);
  auto t0 = Clock::now();
  const MetricField g0 = build_metric(c);
  const FlowContext ctx(g0);
  rec.timings.emplace_back("setup", seconds_since(t0));

  FlowOptions opt;
  opt.integrator = c.flow.integrator;
  opt.t_end = c.flow.t_end;
  opt.snapshot_times = snapshot_schedule(c);
  opt.dt = c.flow.dt;
  opt.safety = c.flow.safety;
  opt.enforce_stability = c.flow.enforce_stability;

  t0 = Clock::now();
  rec.trajectory = integrate_metric_flow(ctx, opt);
  rec.timings.emplace_back("metric_flow", seconds_since(t0));
  const Trajectory& traj = rec.trajectory;
  rec.broke_down = traj.broke_down;
  rec.breakdown_time = traj.breakdown_time;
  rec.breakdown_point = traj.breakdown_point;
  rec.breakdown_message = traj.breakdown_message;
  rec.exit_code = traj.broke_down ? exit_breakdown : exit_ok;

  const int n = c.grid.n;
  const double S1 = c.monitors.S1 > 0.0 ? c.monitors.S1 : c.flow.t_end;
  const double S2 = c.monitors.S2 > 0.0 ? c.monitors.S2 : c.flow.t_end;
  BkOptions bk;
  bk.sample_budget = c.monitors.bk_samples;
  bk.seed = c.monitors.bk_seed;

  t0 = Clock::now();
  std::vector<double> bk_min;
  for (const auto& s : traj.snapshots) {
    rec.rows.push_back(trajectory_row(ctx, s, S1, bk));
    bk_min.push_back(rec.rows.back().bk_min);
  }
  rec.timings.emplace_back("diagnostics", seconds_since(t0));

  t0 = Clock::now();
  auto certs = compute_certificates(c, g0);
  rec.certificates = certs.rows;
  rec.timings.emplace_back("certificates", seconds_since(t0));

  t0 = Clock::now();
  const auto& mc = c.monitors;
  auto& out = rec.monitors;
  if (mc.enabled("evolution_residuals")) {
    for (const auto& r : rec.rows) {
      out.push_back(upper_record("res_psi_evo", r.t, r.res_psi_evo, mc.residual_tolerance));
      out.push_back(upper_record("res_lambda_evo", r.t, r.res_lambda_evo, mc.residual_tolerance));
    }
  }
  if (mc.enabled("kahler_defect")) {
    const bool kahler_start = !rec.rows.empty() && rec.rows.front().kahler_defect <= mc.kahler_tolerance;
    for (const auto& r : rec.rows) {
      auto m = upper_record("kahler_defect", r.t, r.kahler_defect, mc.kahler_tolerance);
      if (!kahler_start) m.verdict = Verdict::inapplicable;
      out.push_back(m);
    }
  }
  double K = mc.K;
  if (K < 0.0) {
    K = 0.0;
    for (double b : bk_min) K = std::max(K, -b);
  }
  const Certificate* a2 = certs.a2 ? &*certs.a2 : nullptr;
  if (mc.enabled("psi_estimates")) {
    const auto rep = monitor_psi_estimates(traj, a2, K, bk_min, S1, mc.tolerance);
    out.insert(out.end(), rep.records.begin(), rep.records.end());
    const double tend = traj.snapshots.back().t;
    out.push_back({"calibration_c1", tend, rep.c1, std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN(),
                   rep.c1_attainable ? Verdict::pass : Verdict::fail});
  }
  if (mc.enabled("trace_bound")) {
    const double K1 = torsion_constant(g0);
    const auto rep =
        monitor_trace_bound(traj, a2, S2, K, K1, TraceConstants{mc.c1, mc.c2, mc.calibrate});
    out.insert(out.end(), rep.records.begin(), rep.records.end());
  }
  if (mc.enabled("max_principle")) {
    const double off = mc.heat_offset, amp = mc.heat_amplitude;
    const Field f0 = sample(g0.grid(), [off, amp](const std::array<double, 4>& x) {
      return cplx(off + amp * std::sin(2.0 * std::numbers::pi * x[0]), 0.0);
    });
    const HeatRun heat = heat_coevolve(ctx, f0, opt);
    const auto mp = max_principle_monitor(heat.samples, mc.tolerance);
    for (const auto& s : heat.samples) {
      const double sup = *std::max_element(s.f.begin(), s.f.end());
      auto m = upper_record("max_principle", s.t, sup, mc.tolerance);
      if (mp.verdict == Verdict::inapplicable) m.verdict = Verdict::inapplicable;
      out.push_back(m);
    }
  }
  rec.timings.emplace_back("monitors", seconds_since(t0));

  if (c.flow.cross_check) {
    t0 = Clock::now();
    const Trajectory pot = integrate_potential_flow(ctx, opt);
    const CrossCheck cc = cross_check_formulations(ctx, traj, pot);
    const double tend = traj.snapshots.back().t;
    out.push_back(upper_record("cross_check_reconstruction", tend, cc.reconstruction, mc.tolerance));
    out.push_back(upper_record("cross_check_formulations", tend, cc.formulations, mc.tolerance));
    for (const auto& s : traj.snapshots) {
      const QuadratureCheck q = quadrature_check(s);
      out.push_back(upper_record("psi_quadrature", s.t, q.difference, 10.0 * q.estimate));
    }
    rec.timings.emplace_back("cross_check", seconds_since(t0));
  }
  (void)n;
  return rec;
}

// ---------------------------------------------------------------------------

namespace {

std::string real(double x) { return fmt::format("{:.12e}", x); }

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, std::string_view header) : path_(path), os_(path) {
    if (!os_) throw std::runtime_error("cannot write " + path.string());
    os_ << "# schema_version=" << csv_schema_version << '\n' << header << '\n';
  }
  template <typename... Cells>
  void row(const Cells&... cells) {
    std::string line;
    ((line += (line.empty() ? "" : ","), line += cell(cells)), ...);
    os_ << line << '\n';
  }
  ~CsvFile() noexcept(false) {
    os_.flush();
    if (!os_ && std::uncaught_exceptions() == 0)
      throw std::runtime_error("error while writing " + path_.string());
  }

 private:
  static std::string cell(double x) { return real(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "true" : "false"; }
  static std::string cell(std::size_t v) { return std::to_string(v); }

  std::filesystem::path path_;
  std::ofstream os_;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("error while writing " + path.string());
}

}  // namespace

void write_trajectory_csv(const std::vector<TrajectoryRow>& rows, const std::filesystem::path& path) {
  CsvFile f(path,
            "t,min_eig_g,max_eig_g,psi_min,psi_max,psidot_min,psidot_max,torsion_sup,"
            "dbar_torsion_sup,bk_min,bk_max,kahler_defect,res_psi_evo,res_lambda_evo");
  for (const auto& r : rows)
    f.row(r.t, r.min_eig_g, r.max_eig_g, r.psi_min, r.psi_max, r.psidot_min, r.psidot_max,
          r.torsion_sup, r.dbar_torsion_sup, r.bk_min, r.bk_max, r.kahler_defect, r.res_psi_evo,
          r.res_lambda_evo);
}

void write_monitors_csv(const std::vector<MonitorRecord>& rows, const std::filesystem::path& path) {
  CsvFile f(path, "monitor,t,measured,bound,margin,verdict");
  for (const auto& r : rows) f.row(r.monitor, r.t, r.measured, r.bound, r.margin, to_string(r.verdict));
}

void write_certificates_csv(const std::vector<CertificateRow>& rows,
                            const std::filesystem::path& path) {
  CsvFile f(path, "kind,S,beta,potential,measured,holds,note");
  for (const auto& r : rows) f.row(r.kind, r.S, r.beta, r.potential, r.measured, r.holds, r.note);
}

void write_profile_csv(const CutoffProfile& p, const std::filesystem::path& path) {
  CsvFile f(path, "s,f,phi,F,F1,F2,F3");
  for (std::size_t i = 0; i < p.s.size(); ++i)
    f.row(p.s[i], p.f[i], p.phi[i], p.F[i], p.F1[i], p.F2[i], p.F3[i]);
}

void write_completion_csv(const std::vector<CompletionReport>& rows,
                          const std::filesystem::path& path) {
  CsvFile f(path,
            "rho0,kappa,active_points,outside_points,ceiling_points,torsion_before,torsion_after,"
            "dbar_torsion_before,dbar_torsion_after,bk_min_before,bk_min_after,eps_torsion,"
            "eps_dbar_torsion,eps_bk,eps_measured");
  for (const auto& r : rows)
    f.row(r.rho0, r.kappa, r.active_points, r.outside_points, r.ceiling_points, r.torsion_before,
          r.torsion_after, r.dbar_torsion_before, r.dbar_torsion_after, r.bk_min_before,
          r.bk_min_after, r.eps_torsion, r.eps_dbar_torsion, r.eps_bk, r.eps_measured);
}

void write_quantities_csv(const std::vector<std::pair<std::string, double>>& rows,
                          const std::filesystem::path& path) {
  CsvFile f(path, "quantity,value");
  for (const auto& [name, value] : rows) f.row(name, value);
}

void write_run(const RunRecord& rec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_trajectory_csv(rec.rows, dir / "trajectory.csv");
  write_monitors_csv(rec.monitors, dir / "monitors.csv");
  write_certificates_csv(rec.certificates, dir / "certificates.csv");
  write_text(dir / "config.txt", rec.config_text);

  std::map<std::string, int> counts;
  for (const auto& m : rec.monitors) ++counts[to_string(m.verdict)];
  std::string summary;
  summary += fmt::format("config_hash = {}\n", rec.config_hash);
  summary += fmt::format("exit_code = {}\n", rec.exit_code);
  summary += fmt::format("snapshots = {}\n", rec.rows.size());
  summary += fmt::format("steps = {}\n", rec.trajectory.steps.size());
  summary += fmt::format("broke_down = {}\n", rec.broke_down);
  if (rec.broke_down) {
    summary += fmt::format("breakdown_time = {}\n", real(rec.breakdown_time));
    summary += fmt::format("breakdown_point = {}\n", rec.breakdown_point);
    summary += fmt::format("breakdown_message = {}\n", rec.breakdown_message);
  }
  for (const auto& [verdict, k] : counts) summary += fmt::format("verdict.{} = {}\n", verdict, k);
  write_text(dir / "summary.txt", summary);

  std::string timings;
  for (const auto& [name, sec] : rec.timings) timings += fmt::format("{} {:.3f}\n", name, sec);
  write_text(dir / "timings.txt", timings);
}

std::vector<std::pair<std::string, double>> identity_report(int n, int N, Scheme scheme,
                                                            std::uint64_t seed) {
  const ComplexGrid grid(n, N, scheme);
  const MetricField g = nonkahler_perturbed_metric(grid, 0.2, seed);
  const ChernPackage pkg = chern_package(g);
  std::vector<std::pair<std::string, double>> out;
  out.emplace_back("torsion_sup", pkg.torsion_sup);
  out.emplace_back("dbar_torsion_sup", pkg.dbar_torsion_sup);
  out.emplace_back("ricci_contraction_gap", sup_norm(pkg.ricci_contracted - pkg.ricci));
  out.emplace_back("ricci_other_gap", sup_norm(pkg.ricci_other - pkg.ricci));
  out.emplace_back("kahler_defect", kahler_defect(g));
  const auto comm = commutation_residual(pkg, seed);
  out.emplace_back("commutation_vector", comm.vector);
  out.emplace_back("commutation_form", comm.form);
  const auto bianchi = bianchi_residuals(pkg);
  for (std::size_t k = 0; k < bianchi.size(); ++k) out.emplace_back(bianchi_names()[k], bianchi[k]);
  const Field F = random_trig_field(grid, seed, "conformal_F", 1, 0.1, true);
  const auto conf = conformal_change_residual(g, F);
  out.emplace_back("conformal_connection", conf.connection);
  out.emplace_back("conformal_torsion", conf.torsion);
  out.emplace_back("conformal_curvature", conf.curvature);
  out.emplace_back("conformal_ricci", conf.ricci);
  return out;
}

std::vector<CompletionReport> completion_sweep(const CutoffProfile& profile,
                                               const SweepOptions& opt) {
  const ComplexGrid grid(2, opt.N);
  const MetricField g = nonkahler_perturbed_metric(grid, opt.epsilon, opt.seed);
  Field r = centered_exhaustion(grid);
  r *= opt.exhaustion_scale;
  std::vector<CompletionReport> out;
  for (double rho0 : opt.rho0) out.push_back(scaled_completion(g, r, rho0, profile));
  return out;
}

std::filesystem::path output_directory(const ScenarioConfig& c, const std::string& out) {
  if (!out.empty()) return out;
  std::filesystem::path root = ".";
  if (const char* env = std::getenv("CHERNLAB_OUTPUT_ROOT"); env && *env) root = env;
  const std::filesystem::path dir =
      c.output_dir.empty() ? "chernlab-" + config_hash(c) : c.output_dir;
  return dir.is_absolute() ? dir : root / dir;
}

}  // namespace chernlab
