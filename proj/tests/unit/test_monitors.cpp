#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chernlab/monitors.hpp"

using namespace chernlab;
using std::numbers::pi;

namespace {

Field heat_initial(const ComplexGrid& g, double offset, double amp) {
  return sample(g, [=](const std::array<double, 4>& x) { return cplx(offset + amp * std::sin(2 * pi * x[0]), 0.0); });
}

FlowOptions heat_options() {
  FlowOptions opt;
  opt.integrator = Integrator::rk4;
  opt.t_end = 0.02;
  opt.snapshot_times = {0.005, 0.01, 0.015};
  return opt;
}

}  // namespace

TEST_CASE("verdict names") {
  CHECK(to_string(Verdict::pass) == "PASS");
  CHECK(to_string(Verdict::fail) == "FAIL");
  CHECK(to_string(Verdict::inapplicable) == "INAPPLICABLE");
}

TEST_CASE("constant f = -1 passes") {
  std::vector<ScalarSample> s;
  for (double t : {0.0, 0.1, 0.2}) s.push_back({t, std::vector<double>(10, -1.0), std::vector<double>(10, 0.0)});
  CHECK(max_principle_monitor(s, 1e-8).verdict == Verdict::pass);
}

TEST_CASE("positive initial data makes the monitor inapplicable") {
  const ComplexGrid g(1, 16);
  const FlowContext ctx(flat_metric(g));
  const HeatRun run = heat_coevolve(ctx, heat_initial(g, -0.1, 0.5), heat_options());
  const auto r = max_principle_monitor(run.samples, 1e-8);
  CHECK(r.verdict == Verdict::inapplicable);
  CHECK_FALSE(r.reason.empty());
}

TEST_CASE("heat flow on the flat torus matches the exact solution and passes") {
  // Flat Laplacian is (1/4) of the Euclidean one: sin(2 pi x) decays like exp(-pi^2 t).
  const ComplexGrid g(1, 16);
  const FlowContext ctx(flat_metric(g));
  const HeatRun run = heat_coevolve(ctx, heat_initial(g, -0.1, 0.05), heat_options());
  REQUIRE(run.samples.size() == 5);
  double err = 0, heat = 0;
  for (const auto& s : run.samples) {
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double x = g.position(p)[0];
      err = std::max(err, std::abs(s.f[p] - (-0.1 + 0.05 * std::exp(-pi * pi * s.t) * std::sin(2 * pi * x))));
      heat = std::max(heat, std::abs(s.heat[p]));
    }
  }
  CHECK(err < 1e-10);
  CHECK(heat < 1e-4);  // second-order differences in t, dt about 1e-3
  const auto r = max_principle_monitor(run.samples, 1e-8);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.sup_f <= 1e-8);
}

TEST_CASE("growth above tolerance fails with the first violation") {
  std::vector<ScalarSample> s;
  s.push_back({0.0, {-0.1, -0.2}, {0.0, 0.0}});
  s.push_back({0.5, {-0.05, -0.2}, {0.0, 0.0}});
  s.push_back({1.0, {0.2, -0.2}, {-1.0, 0.0}});
  s.push_back({1.5, {0.3, 0.1}, {-1.0, -1.0}});
  const auto r = max_principle_monitor(s, 1e-8);
  CHECK(r.verdict == Verdict::fail);
  CHECK(r.violation_time == 1.0);
  CHECK(r.violation_point == 0u);
}

TEST_CASE("positive heat source where f > 0 is inapplicable") {
  std::vector<ScalarSample> s;
  s.push_back({0.0, {-0.1}, {0.0}});
  s.push_back({1.0, {0.2}, {0.5}});
  CHECK(max_principle_monitor(s, 1e-8).verdict == Verdict::inapplicable);
}
