#pragma once

// Scenario configuration: a flat, line-oriented "key = value" text with dotted
// section prefixes. '#' starts a comment. Every key has a default, so a file
// holding only "metric.family = flat" is a complete scenario.
//
//   grid.n = 1                      grid.N = 64            grid.scheme = spectral
//   metric.family = flat | kahler_potential | nonkahler_perturbed | conformal_radial
//   metric.amplitude = 0.1          metric.epsilon = 0.1   metric.seed = 1
//   metric.kmax = 1                 metric.rho0 = 4        metric.radius = 3.8
//   metric.kappa = 0.1
//   flow.integrator = euler         flow.t_end = 0.01      flow.dt = 0 (auto)
//   flow.safety = 0.5               flow.enforce_stability = true
//   flow.snapshots = 10             flow.snapshot_times = (empty: evenly spaced)
//   flow.cross_check = false
//   monitors.list = psi_estimates, trace_bound, max_principle, kahler_defect,
//                   evolution_residuals
//   monitors.tolerance = 1e-6       monitors.residual_tolerance = 1e-5
//   monitors.kahler_tolerance = 1e-6
//   monitors.S1 = 0 (t_end)         monitors.S2 = 0 (t_end)
//   monitors.K = -1 (measured)      monitors.c1 = 1        monitors.c2 = 1
//   monitors.calibrate = true
//   monitors.heat_offset = -0.1     monitors.heat_amplitude = 0.05
//   monitors.bk_samples = 4         monitors.bk_seed = 0
//   certificates.a2 = true          certificates.a2.S = 1  certificates.a2.beta = 0.5
//   certificates.a2.potentials = zero
//   certificates.a3 = false         certificates.a3.S = 1  certificates.a3.beta = 2
//   certificates.a3.potentials = zero
//   certificates.S_max = 10
//   output.dir = (empty: chernlab-<config hash>)
//
// Potential lists are comma separated; an entry is "zero" or "trig:<seed>:<amplitude>".

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chernlab/flow.hpp"
#include "chernlab/grid.hpp"

namespace chernlab {

enum class MetricFamily { flat, kahler_potential, nonkahler_perturbed, conformal_radial };
std::string to_string(MetricFamily f);

struct GridConfig {
  int n = 1;
  int N = 64;
  Scheme scheme = Scheme::spectral;
  bool operator==(const GridConfig&) const = default;
};

struct MetricConfig {
  MetricFamily family = MetricFamily::flat;
  double amplitude = 0.1;
  double epsilon = 0.1;
  std::uint64_t seed = 1;
  int kmax = 1;
  double rho0 = 4.0;
  double radius = 3.8;
  double kappa = 0.1;
  bool operator==(const MetricConfig&) const = default;
};

struct FlowConfig {
  Integrator integrator = Integrator::euler;
  double t_end = 0.01;
  double dt = 0.0;
  double safety = 0.5;
  bool enforce_stability = true;
  int snapshots = 10;
  std::vector<double> snapshot_times;
  bool cross_check = false;
  bool operator==(const FlowConfig&) const = default;
};

struct MonitorConfig {
  std::vector<std::string> list{"psi_estimates", "trace_bound", "max_principle", "kahler_defect",
                                "evolution_residuals"};
  double tolerance = 1e-6;
  double residual_tolerance = 1e-5;
  double kahler_tolerance = 1e-6;
  double S1 = 0.0;
  double S2 = 0.0;
  double K = -1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  bool calibrate = true;
  double heat_offset = -0.1;
  double heat_amplitude = 0.05;
  int bk_samples = 4;
  std::uint64_t bk_seed = 0;
  bool enabled(std::string_view name) const;
  bool operator==(const MonitorConfig&) const = default;
};

struct CertificateSpec {
  bool enabled = false;
  double S = 1.0;
  double beta = 0.5;
  std::vector<std::string> potentials{"zero"};
  bool operator==(const CertificateSpec&) const = default;
};

struct CertificateConfig {
  CertificateSpec a2{true, 1.0, 0.5, {"zero"}};
  CertificateSpec a3{false, 1.0, 2.0, {"zero"}};
  double S_max = 10.0;
  bool operator==(const CertificateConfig&) const = default;
};

struct ScenarioConfig {
  GridConfig grid;
  MetricConfig metric;
  FlowConfig flow;
  MonitorConfig monitors;
  CertificateConfig certificates;
  std::string output_dir;
  bool operator==(const ScenarioConfig&) const = default;
};

struct ConfigIssue {
  int line = 0;  // 0 when the issue is not tied to one line
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Throws ConfigError listing every problem found.
ScenarioConfig parse_config(std::string_view text);

/// Canonical text: every key, fixed order, shortest round-trip number formatting.
std::string emit_config(const ScenarioConfig& config);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

/// Output times handed to the integrator (snapshot_times, or `snapshots` evenly spaced).
std::vector<double> snapshot_schedule(const ScenarioConfig& config);

}  // namespace chernlab
