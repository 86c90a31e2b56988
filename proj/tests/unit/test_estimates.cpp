#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chernlab/estimates.hpp"
#include "chernlab/random.hpp"

using namespace chernlab;
using std::numbers::pi;

namespace {

constexpr double lam = 0.1;

// g = exp(2 lam sin(2 pi x1)) on n = 1; Ric = -2 u_{z zbar} = 2 pi^2 lam sin(2 pi x1).
MetricField bumpy(const ComplexGrid& g) {
  return conformal_exponential_metric(
      sample(g, [](const std::array<double, 4>& x) { return cplx(lam * std::sin(2 * pi * x[0]), 0.0); }));
}

}  // namespace

TEST_CASE("a1 on the flat metric") {
  const ComplexGrid g(1, 32);
  const Field one(g, 1, 1.0);
  const A1Report r0 = certify_a1(one, flat_metric(g));
  CHECK(r0.gradient_sup < 1e-14);
  CHECK(r0.hessian_sup < 1e-14);
  CHECK(r0.compact_chart);

  // rho = 1 + sin^2(pi x1): |d rho| = (pi/2)|sin 2 pi x|, |d dbar rho| = (pi^2/2)|cos 2 pi x|.
  const Field rho = sample(g, [](const std::array<double, 4>& x) {
    const double s = std::sin(pi * x[0]);
    return cplx(1 + s * s, 0.0);
  });
  const A1Report r = certify_a1(rho, flat_metric(g));
  CHECK(r.gradient_sup == doctest::Approx(pi / 2).epsilon(1e-12));
  CHECK(r.hessian_sup == doctest::Approx(pi * pi / 2).epsilon(1e-12));
  const A1Report r4 = certify_a1(rho, scaled(flat_metric(g), 4.0));
  CHECK(r4.gradient_sup == doctest::Approx(r.gradient_sup / 2).epsilon(1e-12));
}

TEST_CASE("flat certificates") {
  const ComplexGrid g(2, 8);
  const MetricField m = flat_metric(g);
  const Field zero(g, 1);
  for (double S : {0.1, 1.0, 50.0}) {
    const Certificate c = certify_a2(m, S, zero, 1.0);
    CHECK(c.holds);
    CHECK(c.measured_margin == doctest::Approx(0.0));
  }
  CHECK(certify_a2(m, 1.0, zero, 0.5).measured_margin == doctest::Approx(0.5));
  const Certificate a3 = certify_a3(m, 1.0, zero, 1.0);
  CHECK(a3.holds);
  CHECK(a3.measured_margin == doctest::Approx(0.0));
  CHECK(certify_a3(m, 1.0, zero, 2.0).measured_margin == doctest::Approx(1.0));
  CHECK_THROWS_AS(certify_a2(m, 1.0, zero, 0.0), std::invalid_argument);

  const std::vector<Field> family{zero};
  const SBEstimate sb = estimate_SB_lower(m, family, 0.5, 10.0);
  CHECK(sb.capped);
  CHECK(sb.S == 10.0);
}

TEST_CASE("S_B bisection against a direct scan") {
  const ComplexGrid g(1, 32);
  const MetricField m = bumpy(g);
  const double beta = 0.5;
  // margin(S) = min_x (1 - beta) g(x) - S Ric(x): the root is the smallest ratio over points with Ric > 0.
  double root = 1e300;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double x = g.position(p)[0];
    const double ric = 2 * pi * pi * lam * std::sin(2 * pi * x);
    if (ric > 1e-12) root = std::min(root, (1 - beta) * std::exp(2 * lam * std::sin(2 * pi * x)) / ric);
  }
  // Dense scan of the certificate margin itself.
  const CertificateMargin margin(m, Field(g, 1), beta);
  double scan = 0.0;
  for (double S = 0.0; S <= 10.0; S += 1e-4)
    if (margin(S) >= -certificate_tolerance) scan = S;
    else break;

  const std::vector<Field> family{Field(g, 1)};
  const SBEstimate sb = estimate_SB_lower(m, family, beta, 10.0);
  CHECK_FALSE(sb.capped);
  CHECK(std::abs(sb.S - root) <= 1e-3);
  CHECK(std::abs(sb.S - scan) <= 1e-3);
  CHECK(certify_a2(m, sb.S, Field(g, 1), beta).holds);
  CHECK_FALSE(certify_a2(m, sb.S + 1e-3, Field(g, 1), beta).holds);

  // A larger family never lowers the estimate.
  const std::vector<Field> bigger{Field(g, 1), random_trig_field(g, 3, "potential", 1, 0.05, true, Weight::hessian)};
  CHECK(estimate_SB_lower(m, bigger, beta, 10.0).S >= sb.S);
}

TEST_CASE("a2 margin is monotone when Ric is non-negative and invariant under joint scaling") {
  const ComplexGrid g(1, 16);
  const MetricField m = bumpy(g);
  const Field zero(g, 1);
  const Certificate c = certify_a2(m, 0.3, zero, 0.5);
  // (g, u, S) -> (lam g, lam u, lam S) scales the slack by lam.
  const Certificate cs = certify_a2(scaled(m, 3.0), 0.9, zero, 0.5);
  CHECK(cs.holds == c.holds);
  CHECK(cs.measured_margin == doctest::Approx(3.0 * c.measured_margin).epsilon(1e-10));

  const MetricField f = flat_metric(g);
  const CertificateMargin mf(f, zero, 0.5);
  CHECK(mf(0.1) >= mf(1.0));
}

TEST_CASE("flat trace bound calibrates to n exp(-A)") {
  const ComplexGrid g(2, 8);
  const FlowContext ctx(flat_metric(g));
  FlowOptions opt;
  opt.t_end = 0.01;
  opt.snapshot_times = {0.005};
  const Trajectory tr = integrate_metric_flow(ctx, opt);
  const Certificate a2 = certify_a2(ctx.g0, 1.0, Field(g, 1), 0.5);
  const double S2 = 0.01;
  const TraceBoundReport rep = monitor_trace_bound(tr, &a2, S2, 0.0, 0.0, TraceConstants{});
  REQUIRE(rep.applicable);
  // m = sup |(S2 - t) * 0 + 0 + n t| = n t_end.
  CHECK(rep.m == doctest::Approx(2 * 0.01));
  const double A = std::pow(2 * rep.m + 1, 2) / 0.5;
  CHECK(rep.A == doctest::Approx(A));
  CHECK(rep.c1 == doctest::Approx(2 * std::exp(-A)).epsilon(1e-12));
  CHECK(rep.sup_upsilon == doctest::Approx(2.0));
  for (const auto& r : rep.records) CHECK(r.verdict == Verdict::pass);

  const TraceBoundReport none = monitor_trace_bound(tr, nullptr, S2, 0.0, 0.0, TraceConstants{});
  CHECK_FALSE(none.applicable);
  for (const auto& r : none.records) CHECK(r.verdict == Verdict::inapplicable);
}

TEST_CASE("flat psi estimates") {
  const ComplexGrid g(1, 16);
  const FlowContext ctx(flat_metric(g));
  FlowOptions opt;
  opt.t_end = 0.01;
  opt.snapshot_times = {0.005};
  const Trajectory tr = integrate_metric_flow(ctx, opt);
  const Certificate a2 = certify_a2(ctx.g0, 1.0, Field(g, 1), 0.5);
  const std::vector<double> bk(tr.snapshots.size(), 0.0);
  const PsiEstimateReport rep = monitor_psi_estimates(tr, &a2, 0.0, bk, 0.01);
  for (const auto& r : rep.records) {
    INFO(r.monitor, " t=", r.t);
    CHECK(r.verdict == Verdict::pass);
    if (r.monitor == "psi_combination") CHECK(r.margin == doctest::Approx(r.t));
  }
  // A BK premise violation marks the snapshot inapplicable.
  const std::vector<double> bad(tr.snapshots.size(), -1.0);
  for (const auto& r : monitor_psi_estimates(tr, &a2, 0.0, bad, 0.01).records)
    CHECK(r.verdict == Verdict::inapplicable);
}

TEST_CASE("torsion constant") {
  const ComplexGrid g(2, 8);
  CHECK(torsion_constant(flat_metric(g)) == 0.0);
  CHECK(torsion_constant(designated_nonkahler_metric(g, 0.2)) > 0.0);
}
