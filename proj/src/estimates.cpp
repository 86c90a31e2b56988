#include "chernlab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace chernlab {

A1Report certify_a1(const Field& rho, const MetricField& g) {
  const int n = g.dim();
  const Field grad = holo_gradient(rho);
  const Field hess = complex_hessian(rho);
  A1Report r;
  for (std::size_t p = 0; p < g.points(); ++p) {
    const SmallMatrix gm = g.at(p);
    const SmallMatrix A = inverse_metric(gm);
    double g2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        g2 += (A(i, j) * grad.at(i, p) * std::conj(grad.at(j, p))).real();
    r.gradient_sup = std::max(r.gradient_sup, std::sqrt(std::max(g2, 0.0)));

    const SmallMatrix E = unitary_frame(gm);
    double h2 = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        cplx v = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) v += E(i, a) * hess.at(i * n + j, p) * std::conj(E(j, b));
        h2 += std::norm(v);
      }
    r.hessian_sup = std::max(r.hessian_sup, std::sqrt(h2));
  }
  return r;
}

std::string to_string(CertificateKind k) { return k == CertificateKind::a2 ? "a2" : "a3"; }

CertificateMargin::CertificateMargin(const MetricField& g, const Field& u, double beta,
                                     CertificateKind kind)
    : kind_(kind), ricci_(chern_ricci(g)) {
  if (!(beta > 0.0)) throw std::invalid_argument("certificate beta must be positive");
  base_ = axpy(complex_hessian(u), 1.0 - beta, g.field());
  if (kind_ == CertificateKind::a3) base_ *= -1.0;
}

double CertificateMargin::operator()(double S) const {
  const double s = kind_ == CertificateKind::a2 ? -S : S;
  return eigen_extent(axpy(base_, s, ricci_)).min;
}

namespace {

Certificate certify(const MetricField& g, double S, const Field& u, double beta, double tol,
                    CertificateKind kind) {
  if (!(S > 0.0)) throw std::invalid_argument("certificate S must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("certificate beta must be positive");
  Certificate c;
  c.kind = kind;
  c.S = S;
  c.beta = beta;
  c.u = u;
  const Field ric = chern_ricci(g);
  Field slack = axpy(complex_hessian(u), 1.0 - beta, g.field());
  if (kind == CertificateKind::a3) slack *= -1.0;
  slack = axpy(slack, kind == CertificateKind::a2 ? -S : S, ric);
  hermitize(slack);
  const auto e = eigen_extent(slack);
  c.measured_margin = e.min;
  c.argmin = e.argmin;
  c.holds = e.min >= -tol;
  return c;
}

}  // namespace

Certificate certify_a2(const MetricField& g, double S, const Field& u, double beta, double tol) {
  return certify(g, S, u, beta, tol, CertificateKind::a2);
}

Certificate certify_a3(const MetricField& g, double S, const Field& v, double beta, double tol) {
  return certify(g, S, v, beta, tol, CertificateKind::a3);
}

SBEstimate estimate_SB_lower(const MetricField& g, std::span<const Field> family, double beta,
                             double S_max, int iterations, double tol) {
  if (family.empty()) throw std::invalid_argument("potential family is empty");
  constexpr double S_min = 1e-6;
  SBEstimate best;
  bool any = false;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const CertificateMargin margin(g, family[k], beta);
    double S = 0.0;
    bool capped = false;
    if (margin(S_max) >= -tol) {
      S = S_max;
      capped = true;
    } else if (margin(S_min) >= -tol) {
      double lo = S_min, hi = S_max;
      for (int it = 0; it < iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        (margin(mid) >= -tol ? lo : hi) = mid;
      }
      S = lo;
    } else {
      continue;
    }
    if (!any || S > best.S) {
      best.S = S;
      best.capped = capped;
      best.potential = k;
      any = true;
    }
  }
  if (!any) best.diagnostic = "no candidate potential certifies S = 1e-6";
  else if (best.capped) best.diagnostic = "certified up to S_max";
  return best;
}

// ---------------------------------------------------------------------------

namespace {

double field_min(const Field& f) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < f.points(); ++p) m = std::min(m, f.at(0, p).real());
  return m;
}

double field_max(const Field& f) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < f.points(); ++p) m = std::max(m, f.at(0, p).real());
  return m;
}

MonitorRecord upper(std::string name, double t, double measured, double bound, double tol) {
  return {std::move(name), t, measured, bound, bound - measured,
          measured <= bound + tol ? Verdict::pass : Verdict::fail};
}

MonitorRecord lower(std::string name, double t, double measured, double bound, double tol) {
  return {std::move(name), t, measured, bound, measured - bound,
          measured >= bound - tol ? Verdict::pass : Verdict::fail};
}

MonitorRecord inapplicable(std::string name, double t, double measured) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {std::move(name), t, measured, nan, nan, Verdict::inapplicable};
}

}  // namespace

PsiEstimateReport monitor_psi_estimates(const Trajectory& traj, const Certificate* a2, double K,
                                        std::span<const double> bk_min, double S1, double tol) {
  if (bk_min.size() != traj.snapshots.size())
    throw std::invalid_argument("one bk_min value per snapshot is required");
  PsiEstimateReport rep;
  if (traj.snapshots.empty()) return rep;
  const int n = traj.snapshots.front().g.dim();
  const double premise_slack = 1e-12 * std::max(1.0, K);

  // Calibration over premise-satisfying snapshots.
  double q_max = 0.0;
  double psidot_inf = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& s = traj.snapshots[k];
    if (bk_min[k] < -K - premise_slack) continue;
    if (s.t > 0.0) q_max = std::max(q_max, field_max(s.psi) / s.t - 1.0);
    psidot_inf = std::min(psidot_inf, field_min(s.psidot));
  }
  if (q_max > 0.0) {
    if (K * S1 > 0.0) {
      rep.c1 = (std::exp(q_max / n) - 1.0) / (K * S1);
    } else {
      rep.c1_attainable = false;
    }
  }
  const bool lower_ok = a2 != nullptr && a2->holds && a2->S > S1 && S1 > 0.0;
  double u_osc = 0.0;
  if (lower_ok) {
    u_osc = field_min(a2->u) - field_max(a2->u);
    if (std::isfinite(psidot_inf)) rep.c_lower = std::max(0.0, u_osc - (a2->S - S1) * psidot_inf);
  }

  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& s = traj.snapshots[k];
    const double comb = field_max(psi_combination(s));
    const double psi_sup = field_max(s.psi);
    const double psidot_min = field_min(s.psidot);
    if (bk_min[k] < -K - premise_slack) {
      rep.records.push_back(inapplicable("psi_combination", s.t, comb));
      rep.records.push_back(inapplicable("psi_upper", s.t, psi_sup));
      rep.records.push_back(inapplicable("psidot_lower", s.t, psidot_min));
      continue;
    }
    rep.sup_combination = std::max(rep.sup_combination, comb);
    rep.records.push_back(upper("psi_combination", s.t, comb, 0.0, tol));
    const double bound = (n * std::log1p(rep.c1 * K * S1) + 1.0) * s.t;
    rep.records.push_back(upper("psi_upper", s.t, psi_sup, bound, tol));
    if (lower_ok) {
      rep.records.push_back(
          lower("psidot_lower", s.t, psidot_min, (u_osc - rep.c_lower) / (a2->S - S1), tol));
    } else {
      rep.records.push_back(inapplicable("psidot_lower", s.t, psidot_min));
    }
  }
  return rep;
}

double trace_bound_value(double m, double alpha, double K, double K1, double c1, double c2) {
  const double A = (2.0 * m + 1.0) * (2.0 * m + 1.0) * (c1 * (K + K1) + 1.0) / alpha;
  return std::exp(A) * 0.5 * (c1 + std::sqrt(c1 * c1 + c2 * K1 * K1 * A));
}

TraceBoundReport monitor_trace_bound(const Trajectory& traj, const Certificate* a2, double S2,
                                     double K, double K1, const TraceConstants& constants) {
  TraceBoundReport rep;
  rep.c1 = constants.c1;
  rep.c2 = constants.c2;
  if (traj.snapshots.empty()) return rep;
  const MetricField& g0 = traj.snapshots.front().g;
  std::vector<double> upsilon;
  for (const auto& s : traj.snapshots) {
    upsilon.push_back(field_max(trace_with_respect_to(g0, s.g.field())));
    rep.sup_upsilon = std::max(rep.sup_upsilon, upsilon.back());
  }
  rep.applicable = a2 != nullptr && a2->holds && S2 > 0.0 && S2 < a2->S;
  if (!rep.applicable) {
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
      rep.records.push_back(inapplicable("trace_bound", traj.snapshots[k].t, upsilon[k]));
    return rep;
  }
  const int n = g0.dim();
  const double ratio = S2 / a2->S;
  for (const auto& s : traj.snapshots) {
    for (std::size_t p = 0; p < s.psi.points(); ++p) {
      const double v = (S2 - s.t) * s.psidot.at(0, p).real() + s.psi.at(0, p).real() + n * s.t -
                       ratio * a2->u.at(0, p).real();
      rep.m = std::max(rep.m, std::abs(v));
    }
  }
  const double alpha = a2->beta;
  if (constants.calibrate) {
    auto value = [&](double c1) { return trace_bound_value(rep.m, alpha, K, K1, c1, rep.c2); };
    if (value(0.0) >= rep.sup_upsilon) {
      rep.c1 = 0.0;
    } else {
      double lo = 0.0, hi = 1.0;
      while (value(hi) < rep.sup_upsilon && hi < 1e300) hi *= 2.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (value(mid) >= rep.sup_upsilon ? hi : lo) = mid;
      }
      rep.c1 = hi;
    }
  }
  rep.A = (2.0 * rep.m + 1.0) * (2.0 * rep.m + 1.0) * (rep.c1 * (K + K1) + 1.0) / alpha;
  const double bound = trace_bound_value(rep.m, alpha, K, K1, rep.c1, rep.c2);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
    rep.records.push_back(upper("trace_bound", traj.snapshots[k].t, upsilon[k], bound,
                                1e-12 * std::max(1.0, bound)));
  return rep;
}

double torsion_constant(const MetricField& g0) {
  const Field gamma = christoffel(g0);
  const Field torsion = torsion_tensor(gamma);
  const auto norms = torsion_norms(g0.field(), torsion, dbar_torsion(torsion));
  return std::max(norms.torsion_sup * norms.torsion_sup, norms.dbar_torsion_sup);
}

}  // namespace chernlab
