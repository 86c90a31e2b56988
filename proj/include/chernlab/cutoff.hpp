#pragma once

// Cutoff profile and conformal completion h0 = exp(2F) g0 with F = P(rho / rho0).
//
// For 0 < kappa < 1/8, with w = (s - 1 + kappa) / kappa:
//   f(s)   = -log(1 - w^2)                         on (1 - 2 kappa, 1)
//   phi(s) = quintic smoothstep from 0 at a = 1 - kappa + kappa^2
//            to 1 at b = 1 - kappa + 2 kappa^2
//   P(s)   = integral_0^s phi(t) f'(t) dt
// P is tabulated by composite Simpson on [0, 1); its derivatives are evaluated
// from the closed forms of phi and f.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "chernlab/chern.hpp"

namespace chernlab {

/// k-th derivative (k <= 3) of f; NaN outside (1 - 2 kappa, 1).
double cutoff_f(double s, double kappa, int k = 0);
/// k-th derivative (k <= 3) of phi.
double cutoff_phi(double s, double kappa, int k = 0);

struct CutoffProfile {
  double kappa = 0.0;
  int nodes = 0;
  double a = 0.0;  // phi vanishes on [0, a]
  double b = 0.0;  // phi is 1 on [b, 1)
  std::vector<double> s;
  std::vector<double> f;
  std::vector<double> phi;
  std::vector<double> F;
  std::vector<double> F1;
  std::vector<double> F2;
  std::vector<double> F3;

  /// Last tabulated abscissa.
  double s_max() const { return s.back(); }
  /// P(s) by cubic Hermite interpolation of (F, F1); throws outside [0, s_max].
  double value(double s) const;
  /// k-th derivative of P for k in 1..3 from closed forms.
  double derivative(double s, int k) const;
};

/// nodes >= 10^4 samples s_i = i / nodes, i < nodes. Throws std::invalid_argument
/// for kappa outside (0, 1/8), and std::logic_error if the tabulated phi' leaves
/// [0, 2 / kappa^2].
CutoffProfile build_profile(double kappa, int nodes = 20000);

struct ProfileCheck {
  std::array<double, 3> weighted_sup{};  // sup exp(-k P) |P^(k)|, k = 1..3
  double c2 = 0.0;  // max over s of (exp(P(s + tau) - P(s - tau)) - 1) / kappa
  double c3 = 0.0;  // min over s of tau exp(P(s - tau)) / kappa^2
  int samples = 0;
  bool ok = true;
  double failing_s = 0.0;
  std::string message;
};

/// Weighted derivative bounds for k <= k_max and, for `samples` points s in
/// (1 - 2 kappa, 1), the largest tau in {kappa^2 exp(-P(s)) 2^-j} with
/// 1 <= exp(P(s + tau) - P(s - tau)) <= 1 + c2_max kappa.
ProfileCheck check_profile(const CutoffProfile& profile, int k_max = 3, int samples = 200,
                           double c2_max = 8.0);

/// (1 / 2n) sum over real axes of cos^2(pi x_a): 0 at the chart centre, 1 at the corners.
Field centered_exhaustion(const ComplexGrid& grid);

struct CompletionReport {
  double rho0 = 0.0;
  double kappa = 0.0;
  std::size_t active_points = 0;
  std::size_t outside_points = 0;  // rho / rho0 >= 1 or beyond the table
  std::size_t ceiling_points = 0;  // exp(2F) above the overflow ceiling
  double torsion_before = 0.0;
  double torsion_after = 0.0;
  double dbar_torsion_before = 0.0;
  double dbar_torsion_after = 0.0;
  double bk_min_before = 0.0;
  double bk_min_after = 0.0;
  double eps_torsion = 0.0;
  double eps_dbar_torsion = 0.0;
  double eps_bk = 0.0;
  double eps_measured = 0.0;
};

struct Completion {
  Field h0;  // exp(2F) g on active points, g elsewhere
  Field F;   // zero off the active set
  std::vector<std::uint8_t> mask;
  std::vector<double> torsion_norm;  // |T|_{h0} on active points, 0 elsewhere
  CompletionReport report;
};

struct CompletionOptions {
  double ceiling = 1e12;
  BkOptions bk{};
};

/// Chern data of h0 are evaluated pointwise from the jet of g and the closed-form
/// derivatives of F, so the blow-up of F near rho = rho0 does not enter any grid
/// derivative. The drifts are (after - before) clipped at 0, for |T|, |dbar T| and
/// -bk_min, and eps_measured is their maximum.
Completion conformal_completion(const MetricField& g, const Field& rho, double rho0,
                                const CutoffProfile& profile,
                                const CompletionOptions& options = {});

/// Completion of rho0^2 g on the unit chart with rho = rho0 * r: the chart then
/// stands for a ball whose size grows with rho0 while |d rho| stays bounded.
CompletionReport scaled_completion(const MetricField& g, const Field& r, double rho0,
                                   const CutoffProfile& profile,
                                   const CompletionOptions& options = {});

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace chernlab
