#pragma once

// Explicit integration of dg/dt = -Ric(g) and of the equivalent scalar
// equation d(psi)/dt = log det(g0 - t Ric0 + ddbar psi) / det g0.

#include <stdexcept>
#include <string>
#include <vector>

#include "chernlab/chern.hpp"
#include "chernlab/metric.hpp"

namespace chernlab {

enum class Integrator { euler, rk4 };

std::string to_string(Integrator i);
Integrator integrator_from_string(const std::string& name);

/// Positivity lost during a step: time and first failing point.
class FlowBreakdown : public std::runtime_error {
 public:
  FlowBreakdown(double t, std::size_t point, double min_eigenvalue)
      : std::runtime_error("flow breakdown at t = " + std::to_string(t) + ", point " +
                           std::to_string(point) + " (smallest eigenvalue " +
                           std::to_string(min_eigenvalue) + ")"),
        t_(t), point_(point) {}
  double time() const { return t_; }
  std::size_t point() const { return point_; }

 private:
  double t_;
  std::size_t point_;
};

/// Requested step larger than the explicit stability bound.
class StabilityViolation : public std::invalid_argument {
 public:
  StabilityViolation(double dt, double dt_max)
      : std::invalid_argument("time step " + std::to_string(dt) + " exceeds stability bound " +
                              std::to_string(dt_max)),
        dt_(dt), dt_max_(dt_max) {}
  double dt() const { return dt_; }
  double dt_max() const { return dt_max_; }

 private:
  double dt_;
  double dt_max_;
};

/// Fixed data of a run: g0, Ric(g0) and log det g0.
struct FlowContext {
  MetricField g0;
  Field ric0;
  Field logdet0;
  explicit FlowContext(const MetricField& g);
};

struct FlowState {
  double t = 0.0;
  MetricField g;
  Field psi;     // real scalar
  Field psidot;  // log(det g / det g0)
};

FlowState initial_state(const FlowContext& ctx);

/// c * h^2 * min eig(g) / (1 + sup|Ric|), c = 0.2 (euler) or 0.5 (rk4), h = 1/N.
double stability_bound(const MetricField& g, const Field& ricci, Integrator integrator);

/// One step of the metric flow; psi advances by the trapezoid rule on psidot.
/// Throws StabilityViolation when `enforce_stability` and dt exceeds the bound,
/// FlowBreakdown when an intermediate or final metric is not positive definite.
/// Returns the stability bound at the start of the step.
double step_metric(FlowState& state, const FlowContext& ctx, double dt, Integrator integrator,
                   bool enforce_stability = true);

/// g0 - t Ric0 + ddbar psi.
Field reference_form(const FlowContext& ctx, double t, const Field& psi);

/// One RK4 step of the scalar equation; the metric is reconstructed from psi.
/// Returns the stability bound at the start of the step when it is enforced, NaN otherwise.
double step_potential(FlowState& state, const FlowContext& ctx, double dt,
                      bool enforce_stability = true);

struct FlowOptions {
  Integrator integrator = Integrator::euler;
  double t_end = 0.0;
  std::vector<double> snapshot_times;  // strictly increasing, inside (0, t_end]; t_end is added
  double dt = 0.0;                     // <= 0 selects safety * stability bound
  double safety = 0.5;
  bool enforce_stability = true;
};

struct Snapshot {
  double t = 0.0;
  MetricField g;
  Field psi;
  Field psidot;
  Field psi_simpson;       // composite Simpson on step pairs
  Field quadrature_error;  // Euler-Maclaurin estimate of the trapezoid error
};

struct StepRecord {
  double t;
  double dt;
  double dt_max;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;  // first snapshot at t = 0
  std::vector<StepRecord> steps;
  bool broke_down = false;
  double breakdown_time = 0.0;
  std::size_t breakdown_point = 0;
  std::string breakdown_message;
};

/// Validated output times of a run: the snapshot times followed by t_end.
std::vector<double> flow_output_times(const FlowOptions& options);

Trajectory integrate_metric_flow(const FlowContext& ctx, const FlowOptions& options);
Trajectory integrate_potential_flow(const FlowContext& ctx, const FlowOptions& options);

/// Sup over matching snapshots of |g_m - (g0 - t Ric0 + ddbar psi_m)| and |g_m - g_p|.
struct CrossCheck {
  double reconstruction = 0.0;
  double formulations = 0.0;
};
CrossCheck cross_check_formulations(const FlowContext& ctx, const Trajectory& metric,
                                    const Trajectory& potential);

/// sup |psi_trapezoid - psi_simpson| and sup |quadrature error estimate| at a snapshot.
struct QuadratureCheck {
  double difference = 0.0;
  double estimate = 0.0;
};
QuadratureCheck quadrature_check(const Snapshot& s);

/// Delta u = g^{i jbar} u_{i jbar}.
Field laplacian(const MetricField& g, const Field& u);

/// d(psidot)/dt = -tr_g Ric(g), evaluated from the metric alone.
Field psidot_rate(const MetricField& g);

/// sup |dPsi/dt - Delta Psi + tr_g g0| with Psi = t psidot - psi - n t and
/// dPsi/dt = t d(psidot)/dt - n.
double evolution_residual_psi(const FlowContext& ctx, const Snapshot& s);

/// sup |dLambda/dt - Delta Lambda + S1 tr_g Ric0 - tr_g g0| with
/// Lambda = (S1 - t) psidot + psi + n t and dLambda/dt = (S1 - t) d(psidot)/dt + n.
double evolution_residual_lambda(const FlowContext& ctx, const Snapshot& s, double S1);

/// Psi = t psidot - psi - n t.
Field psi_combination(const Snapshot& s);

/// Upsilon = tr_href h and Theta = tr_h href.
struct TraceFields {
  Field upsilon;
  Field theta;
};
TraceFields trace_fields(const MetricField& h, const MetricField& href);

/// sup |g(t) - g(0)| over the trajectory.
double metric_drift(const Trajectory& traj);

/// Real part of a scalar field as a plain vector.
std::vector<double> real_values(const Field& f);

}  // namespace chernlab
