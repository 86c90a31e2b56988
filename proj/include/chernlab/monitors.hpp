#pragma once

// Verdict-producing monitors evaluated along trajectories.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "chernlab/flow.hpp"

namespace chernlab {

enum class Verdict { pass, fail, inapplicable };

std::string to_string(Verdict v);

/// One row of monitors.csv.
struct MonitorRecord {
  std::string monitor;
  double t = 0.0;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - measured for upper bounds, measured - bound for lower ones
  Verdict verdict = Verdict::pass;
};

/// A real scalar f sampled at time t together with (d/dt - Delta) f.
struct ScalarSample {
  double t = 0.0;
  std::vector<double> f;
  std::vector<double> heat;
};

struct MaxPrincipleResult {
  Verdict verdict = Verdict::pass;
  double sup_f = 0.0;           // over all samples
  double violation_time = 0.0;  // first sample with sup f > tol (FAIL only)
  std::size_t violation_point = 0;
  std::string reason;
};

/// Premises: f(., 0) <= tol, and (d/dt - Delta) f <= tol wherever f > 0. When they
/// hold the verdict is PASS if f <= tol at every sample and FAIL otherwise; when
/// they do not the verdict is INAPPLICABLE.
MaxPrincipleResult max_principle_monitor(std::span<const ScalarSample> samples, double tol);

/// Integrates the metric flow together with the heat equation df/dt = Delta_{g(t)} f
/// (same integrator and step as the metric) and samples f at t = 0 and at every
/// output time. The heat residual at a sample is (d/dt - Delta) f with the time
/// derivative taken by second-order one-sided differences over equal steps.
struct HeatRun {
  std::vector<ScalarSample> samples;
  bool broke_down = false;
  double breakdown_time = 0.0;
};
HeatRun heat_coevolve(const FlowContext& ctx, const Field& f0, const FlowOptions& options);

}  // namespace chernlab
