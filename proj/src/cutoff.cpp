#include "chernlab/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace chernlab {

double cutoff_f(double s, double kappa, int k) {
  const double w = (s - 1.0 + kappa) / kappa;
  if (!(w > -1.0 && w < 1.0)) return std::numeric_limits<double>::quiet_NaN();
  const double q = 1.0 - w * w;
  switch (k) {
    case 0:
      return -std::log(q);
    case 1:
      return 2.0 * w / q / kappa;
    case 2:
      return 2.0 * (1.0 + w * w) / (q * q) / (kappa * kappa);
    case 3:
      return (4.0 * w * w * w + 12.0 * w) / (q * q * q) / (kappa * kappa * kappa);
    default:
      throw std::invalid_argument("cutoff_f: derivative order above 3");
  }
}

double cutoff_phi(double s, double kappa, int k) {
  const double a = 1.0 - kappa + kappa * kappa;
  const double width = kappa * kappa;
  const double x = (s - a) / width;
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return k == 0 ? 1.0 : 0.0;
  switch (k) {
    case 0:
      return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
    case 1:
      return 30.0 * x * x * (1.0 - x) * (1.0 - x) / width;
    case 2:
      return (120.0 * x * x * x - 180.0 * x * x + 60.0 * x) / (width * width);
    case 3:
      return (360.0 * x * x - 360.0 * x + 60.0) / (width * width * width);
    default:
      throw std::invalid_argument("cutoff_phi: derivative order above 3");
  }
}

namespace {

double integrand(double s, double kappa) {
  const double phi = cutoff_phi(s, kappa, 0);
  return phi == 0.0 ? 0.0 : phi * cutoff_f(s, kappa, 1);
}

double profile_derivative(double s, double kappa, int k) {
  const double p0 = cutoff_phi(s, kappa, 0);
  const double p1 = cutoff_phi(s, kappa, 1);
  if (p0 == 0.0 && p1 == 0.0) return 0.0;
  const double f1 = cutoff_f(s, kappa, 1);
  switch (k) {
    case 1:
      return p0 * f1;
    case 2:
      return p1 * f1 + p0 * cutoff_f(s, kappa, 2);
    case 3:
      return cutoff_phi(s, kappa, 2) * f1 + 2.0 * p1 * cutoff_f(s, kappa, 2) +
             p0 * cutoff_f(s, kappa, 3);
    default:
      throw std::invalid_argument("profile derivative order must be 1, 2 or 3");
  }
}

}  // namespace

double CutoffProfile::value(double x) const {
  if (!(x >= 0.0 && x <= s_max())) throw std::out_of_range("profile evaluated outside its table");
  if (x <= a) return 0.0;
  const auto i = std::min(static_cast<std::size_t>(x * nodes), s.size() - 2);
  const double h = s[i + 1] - s[i];
  const double t = (x - s[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * F[i] + (t3 - 2 * t2 + t) * h * F1[i] +
         (-2 * t3 + 3 * t2) * F[i + 1] + (t3 - t2) * h * F1[i + 1];
}

double CutoffProfile::derivative(double x, int k) const {
  return profile_derivative(x, kappa, k);
}

CutoffProfile build_profile(double kappa, int nodes) {
  if (!(kappa > 0.0 && kappa < 0.125)) throw std::invalid_argument("kappa must lie in (0, 1/8)");
  if (nodes < 10000) throw std::invalid_argument("profile needs at least 10^4 nodes");
  CutoffProfile p;
  p.kappa = kappa;
  p.nodes = nodes;
  p.a = 1.0 - kappa + kappa * kappa;
  p.b = 1.0 - kappa + 2.0 * kappa * kappa;
  const auto m = static_cast<std::size_t>(nodes);
  p.s.resize(m);
  p.f.resize(m);
  p.phi.resize(m);
  p.F.resize(m);
  p.F1.resize(m);
  p.F2.resize(m);
  p.F3.resize(m);
  const double h = 1.0 / nodes;
  const double phi_bound = 2.0 / (kappa * kappa);
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double s = static_cast<double>(i) * h;
    if (i > 0) {
      const double s0 = static_cast<double>(i - 1) * h;
      acc += h / 6.0 *
             (integrand(s0, kappa) + 4.0 * integrand(s0 + 0.5 * h, kappa) + integrand(s, kappa));
    }
    p.s[i] = s;
    p.f[i] = cutoff_f(s, kappa, 0);
    p.phi[i] = cutoff_phi(s, kappa, 0);
    const double dphi = cutoff_phi(s, kappa, 1);
    if (dphi < 0.0 || dphi > phi_bound) throw std::logic_error("phi' leaves [0, 2/kappa^2]");
    p.F[i] = acc;
    p.F1[i] = profile_derivative(s, kappa, 1);
    p.F2[i] = profile_derivative(s, kappa, 2);
    p.F3[i] = profile_derivative(s, kappa, 3);
  }
  return p;
}

ProfileCheck check_profile(const CutoffProfile& p, int k_max, int samples, double c2_max) {
  if (k_max < 1 || k_max > 3) throw std::invalid_argument("k_max must be 1, 2 or 3");
  ProfileCheck out;
  out.samples = samples;
  const std::vector<double>* d[3] = {&p.F1, &p.F2, &p.F3};
  for (int k = 1; k <= k_max; ++k) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.s.size(); ++i)
      m = std::max(m, std::exp(-k * p.F[i]) * std::abs((*d[k - 1])[i]));
    out.weighted_sup[k - 1] = m;
  }

  const double kappa = p.kappa;
  out.c3 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < samples; ++j) {
    const double s = 1.0 - 2.0 * kappa + 2.0 * kappa * (j + 0.5) / samples;
    const double tau0 = kappa * kappa * std::exp(-p.value(s));
    bool found = false;
    for (int e = 0; e <= 60 && !found; ++e) {
      const double tau = std::ldexp(tau0, -e);
      if (s - tau < 0.0 || s + tau > p.s_max()) continue;
      const double ratio = std::exp(p.value(s + tau) - p.value(s - tau));
      if (ratio < 1.0 || ratio > 1.0 + c2_max * kappa) continue;
      found = true;
      out.c2 = std::max(out.c2, (ratio - 1.0) / kappa);
      out.c3 = std::min(out.c3, tau * std::exp(p.value(s - tau)) / (kappa * kappa));
    }
    if (!found) {
      out.ok = false;
      out.failing_s = s;
      out.message = "no admissible tau at s = " + std::to_string(s);
      return out;
    }
  }
  return out;
}

Field centered_exhaustion(const ComplexGrid& grid) {
  const int axes = grid.real_axes();
  return sample(grid, [axes](const std::array<double, 4>& x) {
    double s = 0.0;
    for (int a = 0; a < axes; ++a) {
      const double c = std::cos(std::numbers::pi * x[a]);
      s += c * c;
    }
    return cplx(s / axes, 0.0);
  });
}

namespace {

// Jet of exp(2F) g from the jet of g and F_i, F_{i mbar}.
MetricJet conformal_jet(const MetricJet& g, double F, const std::array<cplx, 2>& Fi,
                        const std::array<cplx, 4>& Fim) {
  const int n = g.h.n;
  const double e = std::exp(2.0 * F);
  MetricJet h;
  h.h = g.h;
  for (auto& v : h.h.a) v *= e;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        h.dh[idx3(n, i, j, l)] = e * (2.0 * Fi[i] * g.h(j, l) + g.dh[idx3(n, i, j, l)]);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          const cplx Fm = std::conj(Fi[m]);
          // d_mbar g_{j lbar} = conj(d_m g_{l jbar}).
          const cplx dbar_g = std::conj(g.dh[idx3(n, m, l, j)]);
          h.ddh[idx4(n, i, m, j, l)] =
              e * ((4.0 * Fi[i] * Fm + 2.0 * Fim[i * n + m]) * g.h(j, l) + 2.0 * Fi[i] * dbar_g +
                   2.0 * Fm * g.dh[idx3(n, i, j, l)] + g.ddh[idx4(n, i, m, j, l)]);
        }
  return h;
}

}  // namespace

Completion conformal_completion(const MetricField& g, const Field& rho, double rho0,
                                const CutoffProfile& profile, const CompletionOptions& opt) {
  if (!(rho0 > 0.0)) throw std::invalid_argument("rho0 must be positive");
  const int n = g.dim();
  const int n2 = n * n;
  const std::size_t points = g.points();
  const MetricDerivatives d = metric_derivatives(g);
  const Field drho = holo_gradient(rho);
  const Field hrho = complex_hessian(rho);

  Completion c;
  c.h0 = g.field();
  c.F = Field(g.grid(), 1);
  c.mask.assign(points, 0);
  c.torsion_norm.assign(points, 0.0);
  Field curv_before(g.grid(), n2 * n2);
  Field curv_after(g.grid(), n2 * n2);
  auto& rep = c.report;
  rep.rho0 = rho0;
  rep.kappa = profile.kappa;

  for (std::size_t p = 0; p < points; ++p) {
    const double r = std::max(rho.at(0, p).real() / rho0, 0.0);
    if (r >= 1.0 || r > profile.s_max()) {
      ++rep.outside_points;
      continue;
    }
    const double F = profile.value(r);
    if (std::exp(2.0 * F) > opt.ceiling) {
      ++rep.ceiling_points;
      continue;
    }
    const double F1 = profile.derivative(r, 1);
    const double F2 = profile.derivative(r, 2);
    std::array<cplx, 2> Fi{};
    std::array<cplx, 4> Fim{};
    for (int i = 0; i < n; ++i) Fi[i] = F1 * drho.at(i, p) / rho0;
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < n; ++m)
        Fim[i * n + m] = F2 * drho.at(i, p) * std::conj(drho.at(m, p)) / (rho0 * rho0) +
                         F1 * hrho.at(i * n + m, p) / rho0;

    const MetricJet jg = jet_at(g, d, p);
    const MetricJet jh = conformal_jet(jg, F, Fi, Fim);
    const PointGeometry before = geometry_from_jet(jg);
    const PointGeometry after = geometry_from_jet(jh);

    c.mask[p] = 1;
    ++rep.active_points;
    c.F.at(0, p) = F;
    for (int q = 0; q < n2; ++q) c.h0.at(q, p) = jh.h.a[q];
    for (int q = 0; q < n2 * n2; ++q) {
      curv_before.at(q, p) = before.curvature[q];
      curv_after.at(q, p) = after.curvature[q];
    }
    c.torsion_norm[p] = after.torsion_norm;
    rep.torsion_before = std::max(rep.torsion_before, before.torsion_norm);
    rep.torsion_after = std::max(rep.torsion_after, after.torsion_norm);
    rep.dbar_torsion_before = std::max(rep.dbar_torsion_before, before.dbar_torsion_norm);
    rep.dbar_torsion_after = std::max(rep.dbar_torsion_after, after.dbar_torsion_norm);
  }
  if (rep.active_points == 0) throw std::invalid_argument("no point with rho / rho0 < 1");

  rep.bk_min_before = bk_extrema(g.field(), curv_before, opt.bk, &c.mask).min;
  rep.bk_min_after = bk_extrema(c.h0, curv_after, opt.bk, &c.mask).min;
  rep.eps_torsion = std::max(0.0, rep.torsion_after - rep.torsion_before);
  rep.eps_dbar_torsion = std::max(0.0, rep.dbar_torsion_after - rep.dbar_torsion_before);
  rep.eps_bk = std::max(0.0, rep.bk_min_before - rep.bk_min_after);
  rep.eps_measured = std::max({rep.eps_torsion, rep.eps_dbar_torsion, rep.eps_bk});
  return c;
}

CompletionReport scaled_completion(const MetricField& g, const Field& r, double rho0,
                                   const CutoffProfile& profile, const CompletionOptions& opt) {
  Field rho = r;
  rho *= rho0;
  return conformal_completion(scaled(g, rho0 * rho0), rho, rho0, profile, opt).report;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace chernlab
