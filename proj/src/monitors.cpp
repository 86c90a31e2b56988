#include "chernlab/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chernlab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "PASS";
    case Verdict::fail:
      return "FAIL";
    case Verdict::inapplicable:
      return "INAPPLICABLE";
  }
  return "?";
}

MaxPrincipleResult max_principle_monitor(std::span<const ScalarSample> samples, double tol) {
  MaxPrincipleResult r;
  if (samples.empty()) {
    r.verdict = Verdict::inapplicable;
    r.reason = "no samples";
    return r;
  }
  r.sup_f = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples)
    for (double v : s.f) r.sup_f = std::max(r.sup_f, v);

  const auto& first = samples.front();
  for (std::size_t p = 0; p < first.f.size(); ++p) {
    if (first.f[p] > tol) {
      r.verdict = Verdict::inapplicable;
      r.reason = "initial data positive at point " + std::to_string(p);
      return r;
    }
  }
  for (const auto& s : samples) {
    for (std::size_t p = 0; p < s.f.size(); ++p) {
      if (s.f[p] > 0.0 && s.heat[p] > tol) {
        r.verdict = Verdict::inapplicable;
        r.reason = "(d/dt - Delta) f > 0 where f > 0 at t = " + std::to_string(s.t);
        return r;
      }
    }
  }
  for (const auto& s : samples) {
    for (std::size_t p = 0; p < s.f.size(); ++p) {
      if (s.f[p] > tol) {
        r.verdict = Verdict::fail;
        r.violation_time = s.t;
        r.violation_point = p;
        r.reason = "f > 0 at t = " + std::to_string(s.t);
        return r;
      }
    }
  }
  r.verdict = Verdict::pass;
  return r;
}

namespace {

MetricField stage_metric(Field f, double t) {
  hermitize(f);
  const auto e = eigen_extent(f);
  if (!(e.min > 0.0)) throw FlowBreakdown(t, e.argmin, e.min);
  return MetricField(std::move(f), false);
}

Field real_laplacian(const MetricField& g, const Field& f) {
  Field lap = laplacian(g, f);
  for (auto& v : lap.values()) v = v.real();
  return lap;
}

ScalarSample make_sample(double t, const MetricField& g, const Field& f, const Field& dfdt) {
  const Field lap = real_laplacian(g, f);
  ScalarSample s;
  s.t = t;
  s.f = real_values(f);
  s.heat.resize(s.f.size());
  for (std::size_t p = 0; p < s.f.size(); ++p) s.heat[p] = dfdt.at(0, p).real() - lap.at(0, p).real();
  return s;
}

// (3 f2 - 4 f1 + f0) / (2 dt), or the forward variant with sign -1.
Field one_sided(const Field& a, const Field& b, const Field& c, double dt, double sign) {
  Field out(a.grid(), 1);
  for (std::size_t p = 0; p < out.points(); ++p)
    out.at(0, p) = sign * (3.0 * c.at(0, p) - 4.0 * b.at(0, p) + a.at(0, p)) / (2.0 * dt);
  return out;
}

}  // namespace

HeatRun heat_coevolve(const FlowContext& ctx, const Field& f0, const FlowOptions& opt) {
  const auto times = flow_output_times(opt);
  HeatRun run;
  MetricField g = ctx.g0;
  Field f = f0;
  for (auto& v : f.values()) v = v.real();
  double t = 0.0;
  bool first_interval = true;
  try {
    for (double b : times) {
      const double a = t;
      const double dt_max = stability_bound(g, chern_ricci(g), opt.integrator);
      const double target = opt.dt > 0.0 ? opt.dt : opt.safety * dt_max;
      if (!(target > 0.0)) throw std::invalid_argument("non-positive time step");
      auto m = static_cast<long>(std::ceil((b - a) / target - 1e-9));
      m = std::max(m, 2L);
      if (m % 2 != 0) ++m;
      const double dt = (b - a) / static_cast<double>(m);
      if (opt.dt > 0.0 && opt.enforce_stability && dt > dt_max * (1.0 + 1e-12))
        throw StabilityViolation(dt, dt_max);

      // f at the two previous steps, for the one-sided differences.
      Field prev2;
      Field prev1 = f;
      const Field f_start = f;
      const MetricField g_start = g;
      for (long k = 0; k < m; ++k) {
        if (opt.integrator == Integrator::euler) {
          const Field ric = chern_ricci(g);
          const Field lap = real_laplacian(g, f);
          g = stage_metric(axpy(g.field(), -dt, ric), t + dt);
          f = axpy(f, dt, lap);
        } else {
          const Field r1 = chern_ricci(g);
          const Field l1 = real_laplacian(g, f);
          const MetricField g2 = stage_metric(axpy(g.field(), -0.5 * dt, r1), t + 0.5 * dt);
          const Field f2 = axpy(f, 0.5 * dt, l1);
          const Field r2 = chern_ricci(g2);
          const Field l2 = real_laplacian(g2, f2);
          const MetricField g3 = stage_metric(axpy(g.field(), -0.5 * dt, r2), t + 0.5 * dt);
          const Field f3 = axpy(f, 0.5 * dt, l2);
          const Field r3 = chern_ricci(g3);
          const Field l3 = real_laplacian(g3, f3);
          const MetricField g4 = stage_metric(axpy(g.field(), -dt, r3), t + dt);
          const Field f4 = axpy(f, dt, l3);
          const Field r4 = chern_ricci(g4);
          const Field l4 = real_laplacian(g4, f4);
          Field gn = g.field();
          auto out = gn.values();
          auto fo = f.values();
          {
            auto a1 = r1.values(), a2 = r2.values(), a3 = r3.values(), a4 = r4.values();
            for (std::size_t p = 0; p < out.size(); ++p)
              out[p] -= dt / 6.0 * (a1[p] + 2.0 * a2[p] + 2.0 * a3[p] + a4[p]);
          }
          {
            auto a1 = l1.values(), a2 = l2.values(), a3 = l3.values(), a4 = l4.values();
            for (std::size_t p = 0; p < fo.size(); ++p)
              fo[p] += dt / 6.0 * (a1[p] + 2.0 * a2[p] + 2.0 * a3[p] + a4[p]);
          }
          g = stage_metric(std::move(gn), t + dt);
        }
        for (auto& v : f.values()) v = v.real();
        t = (k + 1 == m) ? b : a + static_cast<double>(k + 1) * dt;
        if (first_interval && k == 1)
          run.samples.push_back(
              make_sample(a, g_start, f_start, one_sided(f, prev1, f_start, dt, -1.0)));
        if (k + 1 < m) {
          prev2 = std::move(prev1);
          prev1 = f;
        }
      }
      first_interval = false;
      run.samples.push_back(make_sample(t, g, f, one_sided(prev2, prev1, f, dt, 1.0)));
    }
  } catch (const FlowBreakdown& br) {
    run.broke_down = true;
    run.breakdown_time = br.time();
  }
  return run;
}

}  // namespace chernlab
