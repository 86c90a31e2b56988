#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chernlab/cutoff.hpp"
#include "chernlab/identities.hpp"

using namespace chernlab;

TEST_CASE("closed forms of f and phi") {
  const double k = 0.1;
  // w = (s - 1 + kappa) / kappa; f = -log(1 - w^2).
  CHECK(cutoff_f(0.95, k) == doctest::Approx(-std::log(0.75)).epsilon(1e-14));
  CHECK(cutoff_f(0.9, k) == doctest::Approx(0.0));
  CHECK(std::isnan(cutoff_f(0.5, k)));
  CHECK(std::isnan(cutoff_f(1.0, k)));
  // Derivatives against central differences.
  for (double s : {0.85, 0.93, 0.97}) {
    for (int d = 0; d < 3; ++d) {
      const double h = 1e-6;
      const double fd = (cutoff_f(s + h, k, d) - cutoff_f(s - h, k, d)) / (2 * h);
      CHECK(cutoff_f(s, k, d + 1) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
  const double a = 1 - k + k * k, b = 1 - k + 2 * k * k;
  CHECK(cutoff_phi(a, k) == 0.0);
  CHECK(cutoff_phi(b, k) == doctest::Approx(1.0));
  CHECK(cutoff_phi(0.5 * (a + b), k) == doctest::Approx(0.5));
  CHECK(cutoff_phi(0.5 * (a + b), k, 1) == doctest::Approx(1.875 / (k * k)));
  for (double s : {a + 0.2 * k * k, a + 0.7 * k * k}) {
    for (int d = 0; d < 3; ++d) {
      const double h = 1e-8;
      const double fd = (cutoff_phi(s + h, k, d) - cutoff_phi(s - h, k, d)) / (2 * h);
      CHECK(cutoff_phi(s, k, d + 1) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("profile is zero before a and monotone") {
  const CutoffProfile p = build_profile(0.1);
  CHECK_THROWS_AS(build_profile(0.2), std::invalid_argument);
  CHECK_THROWS_AS(build_profile(0.1, 100), std::invalid_argument);
  bool zeros = true, monotone = true;
  for (std::size_t i = 0; i < p.s.size(); ++i) {
    if (p.s[i] <= p.a && p.F[i] != 0.0) zeros = false;
    if (i > 0 && p.F[i] < p.F[i - 1]) monotone = false;
  }
  CHECK(zeros);
  CHECK(monotone);
  CHECK(p.value(0.3) == 0.0);
  // Past b, P' = f', so P(s) - P(b) = f(s) - f(b).
  const double s = 0.97;
  CHECK(p.value(s) - p.value(p.b) == doctest::Approx(cutoff_f(s, 0.1) - cutoff_f(p.b, 0.1)).epsilon(1e-8));
  CHECK(p.derivative(s, 1) == doctest::Approx(cutoff_f(s, 0.1, 1)));
}

TEST_CASE("profile build is deterministic") {
  const CutoffProfile a = build_profile(0.1, 10000), b = build_profile(0.1, 10000);
  CHECK(a.F == b.F);
  CHECK(a.F3 == b.F3);
}

TEST_CASE("weighted derivative bounds are stable under node doubling") {
  const auto c1 = check_profile(build_profile(0.1, 20000));
  const auto c2 = check_profile(build_profile(0.1, 40000));
  CHECK(c1.ok);
  CHECK(c1.samples == 200);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::isfinite(c1.weighted_sup[k]));
    CHECK(std::abs(c2.weighted_sup[k] / c1.weighted_sup[k] - 1) <= 0.01);
  }
  CHECK(c1.c3 > 0.0);
}

TEST_CASE("completion inside the flat region leaves the metric alone") {
  const ComplexGrid g(2, 8);
  const MetricField m = nonkahler_perturbed_metric(g, 0.2, 2);
  const CutoffProfile p = build_profile(0.1);
  Field rho = centered_exhaustion(g);
  rho *= 0.5;  // rho / rho0 <= 0.5 / 4 < a
  const Completion c = conformal_completion(m, rho, 4.0, p);
  CHECK(sup_norm(c.h0 - m.field()) == 0.0);
  CHECK(c.report.eps_measured == 0.0);
  CHECK(c.report.outside_points == 0u);
}

TEST_CASE("completion torsion matches the conformal law on a flat chart") {
  // Flat g: T_h^k_{ij} = 2 (F_i delta^k_j - F_j delta^k_i). For n = 2 the h-frame
  // norm is e^{-F} (8 |dF|^2)^{1/2}.
  const ComplexGrid g(2, 16);
  const CutoffProfile p = build_profile(0.1);
  Field rho = centered_exhaustion(g);
  rho *= 3.9;
  const double rho0 = 4.0;
  const Completion c = conformal_completion(flat_metric(g), rho, rho0, p);
  REQUIRE(c.report.active_points > 0);
  const Field grad = holo_gradient(rho);
  double err = 0, sup = 0;
  for (std::size_t q = 0; q < g.size(); ++q) {
    if (!c.mask[q]) continue;
    const double s = rho.at(0, q).real() / rho0;
    const double F = p.value(s), F1 = p.derivative(s, 1) / rho0;
    double d2 = 0;
    for (int i = 0; i < 2; ++i) d2 += std::norm(F1 * grad.at(i, q));
    const double expect = 2 * std::sqrt(2.0) * std::exp(-F) * std::sqrt(d2);
    err = std::max(err, std::abs(c.torsion_norm[q] - expect));
    sup = std::max(sup, expect);
  }
  CHECK(sup > 1e-3);
  CHECK(err <= 1e-8 * std::max(1.0, sup));
}

TEST_CASE("drift decreases across the rho0 sweep with slope near -1") {
  const ComplexGrid g(2, 12);
  const MetricField m = nonkahler_perturbed_metric(g, 0.2, 7);
  const CutoffProfile p = build_profile(0.1);
  Field r = centered_exhaustion(g);
  r *= 1.25;
  std::vector<double> x, y;
  for (double rho0 : {4.0, 8.0, 16.0}) {
    const CompletionReport rep = scaled_completion(m, r, rho0, p);
    x.push_back(rho0);
    y.push_back(rep.eps_torsion);
  }
  CHECK(y[0] > y[1]);
  CHECK(y[1] > y[2]);
  const double slope = loglog_slope(x, y);
  CHECK(slope >= -1.3);
  CHECK(slope <= -0.7);
}
