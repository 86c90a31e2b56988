#pragma once

// Scenario orchestration and CSV persistence.
//
// Every CSV starts with "# schema_version=1" followed by a header line. Reals are
// written as {:.12e}; verdicts and names as plain words.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "chernlab/config.hpp"
#include "chernlab/cutoff.hpp"
#include "chernlab/estimates.hpp"
#include "chernlab/flow.hpp"
#include "chernlab/monitors.hpp"

namespace chernlab {

inline constexpr int csv_schema_version = 1;

/// Exit codes shared by run_scenario and the command line tool.
enum ExitCode : int { exit_ok = 0, exit_error = 1, exit_breakdown = 2 };

MetricField build_metric(const ScenarioConfig& config);
/// Resolves a potential list entry ("zero" or "trig:<seed>:<amplitude>") on a grid.
Field build_potential(const ComplexGrid& grid, const std::string& spec);

struct TrajectoryRow {
  double t = 0.0;
  double min_eig_g = 0.0;
  double max_eig_g = 0.0;
  double psi_min = 0.0;
  double psi_max = 0.0;
  double psidot_min = 0.0;
  double psidot_max = 0.0;
  double torsion_sup = 0.0;
  double dbar_torsion_sup = 0.0;
  double bk_min = 0.0;
  double bk_max = 0.0;
  double kahler_defect = 0.0;
  double res_psi_evo = 0.0;
  double res_lambda_evo = 0.0;
};

struct CertificateRow {
  std::string kind;  // a1, a2, a3 or SB_lower
  double S = 0.0;
  double beta = 0.0;
  std::string potential;
  double measured = 0.0;  // slack for a2/a3, sup |d rho| for a1, estimate for SB_lower
  bool holds = false;
  std::string note;
};

struct RunRecord {
  std::string config_hash;
  std::string config_text;
  Trajectory trajectory;
  std::vector<TrajectoryRow> rows;
  std::vector<MonitorRecord> monitors;
  std::vector<CertificateRow> certificates;
  bool broke_down = false;
  double breakdown_time = 0.0;
  std::size_t breakdown_point = 0;
  std::string breakdown_message;
  std::vector<std::pair<std::string, double>> timings;  // seconds
  int exit_code = exit_ok;
};

/// Runs the configured flow and monitors. Configuration problems propagate as
/// exceptions; a flow breakdown sets exit_code = exit_breakdown and keeps every
/// snapshot up to the breakdown.
RunRecord run_scenario(const ScenarioConfig& config);

/// Certificates only (a1 with the centred exhaustion, a2/a3, S_B lower bound).
std::vector<CertificateRow> certify_scenario(const ScenarioConfig& config);

TrajectoryRow trajectory_row(const FlowContext& ctx, const Snapshot& s, double S1,
                             const BkOptions& bk);

/// Writes trajectory.csv, monitors.csv, certificates.csv, config.txt, summary.txt
/// and timings.txt (the only file holding wall-clock data) into `dir`.
void write_run(const RunRecord& record, const std::filesystem::path& dir);

void write_trajectory_csv(const std::vector<TrajectoryRow>& rows, const std::filesystem::path& path);
void write_monitors_csv(const std::vector<MonitorRecord>& rows, const std::filesystem::path& path);
void write_certificates_csv(const std::vector<CertificateRow>& rows,
                            const std::filesystem::path& path);
void write_profile_csv(const CutoffProfile& profile, const std::filesystem::path& path);
void write_completion_csv(const std::vector<CompletionReport>& rows,
                          const std::filesystem::path& path);
void write_quantities_csv(const std::vector<std::pair<std::string, double>>& rows,
                          const std::filesystem::path& path);

/// Identity residuals for one seeded random metric, as (quantity, value) pairs.
std::vector<std::pair<std::string, double>> identity_report(int n, int N, Scheme scheme,
                                                            std::uint64_t seed);

/// rho0-sweep of the scaled conformal completion on a seeded non-Kahler n = 2 metric.
struct SweepOptions {
  int N = 16;
  double epsilon = 0.2;
  std::uint64_t seed = 7;
  double exhaustion_scale = 1.25;
  std::vector<double> rho0{4.0, 8.0, 16.0};
};
std::vector<CompletionReport> completion_sweep(const CutoffProfile& profile,
                                               const SweepOptions& options = {});

/// Directory for a run: `out` when given, else $CHERNLAB_OUTPUT_ROOT (or the
/// working directory) joined with output.dir (or "chernlab-<hash>").
std::filesystem::path output_directory(const ScenarioConfig& config, const std::string& out);

}  // namespace chernlab
