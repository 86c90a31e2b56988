#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chernlab/identities.hpp"
#include "chernlab/random.hpp"

using namespace chernlab;
using std::numbers::pi;

TEST_CASE("flat metric: commutation residuals vanish") {
  const ChernPackage p = chern_package(flat_metric(ComplexGrid(2, 8)));
  CHECK(commutation_residual(p, 1).max() < 1e-12);
  for (double r : bianchi_residuals(p)) CHECK(r < 1e-12);
}

TEST_CASE("random non-Kahler metric, spectral") {
  const ComplexGrid g(2, 16);
  for (std::uint64_t seed : {3u, 4u}) {
    const ChernPackage p = chern_package(nonkahler_perturbed_metric(g, 0.2, seed));
    CHECK(p.torsion_sup > 1e-3);
    CHECK(commutation_residual(p, seed).max() <= 1e-8);
    const auto b = bianchi_residuals(p);
    for (std::size_t k = 0; k < b.size(); ++k) {
      INFO(bianchi_names()[k]);
      CHECK(b[k] <= 1e-7);
    }
  }
}

TEST_CASE("Bianchi residuals converge under central4") {
  auto residual = [](int N) {
    const ComplexGrid g(2, N, Scheme::central4);
    const auto b = bianchi_residuals(chern_package(nonkahler_perturbed_metric(g, 0.2, 3)));
    return *std::max_element(b.begin(), b.end());
  };
  const std::array<int, 3> Ns{8, 12, 16};
  const double order = convergence_order(residual, Ns);
  CHECK(order > 3.0);
}

TEST_CASE("conformal change laws") {
  const ComplexGrid g(2, 16);
  const MetricField m = nonkahler_perturbed_metric(g, 0.2, 6);
  const Field F = random_trig_field(g, 6, "F", 1, 0.2, true);
  CHECK(conformal_change_residual(m, F).max() <= 1e-8);

  // Constant F: R_h = e^{2F} R_g exactly, so compare on the scale of R_g.
  Field c(g, 1, cplx(0.37, 0.0));
  const ConformalResidual r = conformal_change_residual(m, c);
  CHECK(r.connection <= 1e-12);
  CHECK(r.torsion <= 1e-12);
  CHECK(r.ricci <= 1e-12);
  CHECK(r.curvature * std::exp(-0.74) <= 1e-12);
}

TEST_CASE("conformal Ricci of flat metric with F = 0.1 sin(2 pi x1)") {
  // Ric_h = -2n F_{k lbar}; F_{1 1bar} = -pi^2 F.
  const ComplexGrid g(2, 8);
  const Field F = sample(g, [](const std::array<double, 4>& x) { return cplx(0.1 * std::sin(2 * pi * x[0]), 0.0); });
  Field h(g, 4);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double e = std::exp(2 * F.at(0, p).real());
    h.at(0, p) = e;
    h.at(3, p) = e;
  }
  const Field ric = chern_ricci(MetricField(h));
  double err = 0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    err = std::max(err, std::abs(ric.at(0, p) - cplx(4 * pi * pi * F.at(0, p).real(), 0)));
    err = std::max({err, std::abs(ric.at(1, p)), std::abs(ric.at(2, p)), std::abs(ric.at(3, p))});
  }
  CHECK(err < 1e-11);
}
