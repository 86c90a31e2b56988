#pragma once

// Certificates for the deformation conditions on g0 and calibrated estimate
// monitors along trajectories.
//
// Unspecified dimensional constants are never fixed here: monitors either take
// them from the caller (assertion mode) or report the smallest value that makes
// the bound hold over the run (calibration mode).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chernlab/flow.hpp"
#include "chernlab/monitors.hpp"

namespace chernlab {

/// sup |d rho|_g and sup |d dbar rho|_g (frame norm). Equivalence with a distance
/// function is automatic on a compact chart and only reported.
struct A1Report {
  double gradient_sup = 0.0;
  double hessian_sup = 0.0;
  bool compact_chart = true;
};
A1Report certify_a1(const Field& rho, const MetricField& g);

enum class CertificateKind { a2, a3 };
std::string to_string(CertificateKind k);

/// a2: g0 - S Ric0 + ddbar u >= beta g0.   a3: g0 - S Ric0 + ddbar v <= beta g0.
/// measured_margin is the smallest eigenvalue of the slack matrix over the grid
/// (LHS - beta g0 for a2, beta g0 - LHS for a3).
struct Certificate {
  CertificateKind kind = CertificateKind::a2;
  double S = 0.0;
  double beta = 0.0;
  Field u;
  double measured_margin = 0.0;
  std::size_t argmin = 0;
  bool holds = false;
};

constexpr double certificate_tolerance = 1e-12;

Certificate certify_a2(const MetricField& g, double S, const Field& u, double beta,
                       double tol = certificate_tolerance);
Certificate certify_a3(const MetricField& g, double S, const Field& v, double beta,
                       double tol = certificate_tolerance);

/// Slack of the a2 (or a3) matrix as a function of S for fixed (g, u, beta).
/// The slack is the pointwise minimum of affine functions of S, hence concave.
class CertificateMargin {
 public:
  CertificateMargin(const MetricField& g, const Field& u, double beta,
                    CertificateKind kind = CertificateKind::a2);
  double operator()(double S) const;

 private:
  CertificateKind kind_;
  Field base_;  // (1 - beta) g0 + ddbar u
  Field ricci_;
};

struct SBEstimate {
  double S = 0.0;
  bool capped = false;      // S_max itself certified
  std::size_t potential = 0;  // family member achieving S
  std::string diagnostic;
};

/// Largest S certified for (a2) by bisection (30 halvings of [1e-6, S_max]) over the
/// candidate potentials. A lower bound for the grid value of S_B.
SBEstimate estimate_SB_lower(const MetricField& g, std::span<const Field> family, double beta,
                             double S_max = 10.0, int iterations = 30,
                             double tol = certificate_tolerance);

/// Monitors built from the potential along a trajectory.
///   psi_combination  sup (t psidot - psi - n t) <= tol
///   psi_upper        sup psi <= (n log(1 + c1 K S1) + 1) t        (c1 calibrated)
///   psidot_lower     inf psidot >= (inf u - sup u - c) / (S - S1)  (c calibrated)
/// bk_min holds the measured bisectional minimum at each snapshot; a snapshot with
/// bk_min < -K makes its rows INAPPLICABLE. psidot_lower needs a holding a2
/// certificate with S > S1.
struct PsiEstimateReport {
  std::vector<MonitorRecord> records;
  double c1 = 0.0;
  double c_lower = 0.0;
  bool c1_attainable = true;
  double sup_combination = 0.0;
};
PsiEstimateReport monitor_psi_estimates(const Trajectory& traj, const Certificate* a2, double K,
                                        std::span<const double> bk_min, double S1,
                                        double tol = 1e-6);

/// tr_{g0} g(t) <= exp(A + log((c1 + sqrt(c1^2 + c2 K1^2 A)) / 2)),
/// A = (2m + 1)^2 (c1 (K + K1) + 1) / alpha, with alpha = beta of the a2
/// certificate and m = sup |(S2 - t) psidot + psi + n t - (S2 / S) u| over the run.
struct TraceConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  bool calibrate = true;  // replace c1 by the smallest value that holds over the run
};
struct TraceBoundReport {
  std::vector<MonitorRecord> records;
  double m = 0.0;
  double A = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double sup_upsilon = 0.0;
  bool applicable = false;
};
double trace_bound_value(double m, double alpha, double K, double K1, double c1, double c2);
TraceBoundReport monitor_trace_bound(const Trajectory& traj, const Certificate* a2, double S2,
                                     double K, double K1, const TraceConstants& constants);

/// K1 for the trace bound: max(sup |T|_g^2, sup |dbar T|_g) of g0.
double torsion_constant(const MetricField& g0);

}  // namespace chernlab
