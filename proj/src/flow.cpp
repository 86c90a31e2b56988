#include "chernlab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chernlab {

std::string to_string(Integrator i) { return i == Integrator::euler ? "euler" : "rk4"; }

Integrator integrator_from_string(const std::string& name) {
  if (name == "euler") return Integrator::euler;
  if (name == "rk4") return Integrator::rk4;
  throw std::invalid_argument("unknown time integrator '" + name + "'");
}

FlowContext::FlowContext(const MetricField& g)
    : g0(g), ric0(chern_ricci(g)), logdet0(log_det(g)) {}

namespace {

MetricField checked_metric(Field f, double t) {
  hermitize(f);
  const auto e = eigen_extent(f);
  if (!(e.min > 0.0)) throw FlowBreakdown(t, e.argmin, e.min);
  return MetricField(std::move(f), false);
}

Field log_det_ratio(const MetricField& g, const FlowContext& ctx) {
  Field f = log_det(g);
  f -= ctx.logdet0;
  return f;
}

Field real_part(Field f) {
  for (auto& v : f.values()) v = v.real();
  return f;
}

}  // namespace

FlowState initial_state(const FlowContext& ctx) {
  FlowState s;
  s.t = 0.0;
  s.g = ctx.g0;
  s.psi = Field(ctx.g0.grid(), 1);
  s.psidot = Field(ctx.g0.grid(), 1);
  return s;
}

double stability_bound(const MetricField& g, const Field& ricci, Integrator integrator) {
  const double c = integrator == Integrator::euler ? 0.2 : 0.5;
  const double h = g.grid().spacing();
  const double lam = eigen_extent(g.field()).min;
  return c * h * h * lam / (1.0 + sup_norm(ricci));
}

double step_metric(FlowState& state, const FlowContext& ctx, double dt, Integrator integrator,
                   bool enforce_stability) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const Field ric = chern_ricci(state.g);
  const double bound = stability_bound(state.g, ric, integrator);
  if (enforce_stability && dt > bound * (1.0 + 1e-12)) throw StabilityViolation(dt, bound);
  const double t = state.t;
  Field next;
  if (integrator == Integrator::euler) {
    next = axpy(state.g.field(), -dt, ric);
  } else {
    const Field& k1 = ric;
    const MetricField g2 = checked_metric(axpy(state.g.field(), -0.5 * dt, k1), t + 0.5 * dt);
    const Field k2 = chern_ricci(g2);
    const MetricField g3 = checked_metric(axpy(state.g.field(), -0.5 * dt, k2), t + 0.5 * dt);
    const Field k3 = chern_ricci(g3);
    const MetricField g4 = checked_metric(axpy(state.g.field(), -dt, k3), t + dt);
    const Field k4 = chern_ricci(g4);
    next = state.g.field();
    auto out = next.values();
    auto a = k1.values(), b = k2.values(), c = k3.values(), d = k4.values();
    for (std::size_t p = 0; p < out.size(); ++p)
      out[p] -= dt / 6.0 * (a[p] + 2.0 * b[p] + 2.0 * c[p] + d[p]);
  }
  state.g = checked_metric(std::move(next), t + dt);
  Field psidot = real_part(log_det_ratio(state.g, ctx));
  auto psi = state.psi.values();
  auto old = state.psidot.values();
  auto cur = psidot.values();
  for (std::size_t p = 0; p < psi.size(); ++p) psi[p] += 0.5 * dt * (old[p] + cur[p]);
  state.psidot = std::move(psidot);
  state.t = t + dt;
  return bound;
}

Field reference_form(const FlowContext& ctx, double t, const Field& psi) {
  Field form = axpy(ctx.g0.field(), -t, ctx.ric0);
  form += complex_hessian(psi);
  hermitize(form);
  return form;
}

namespace {

Field potential_rate(const FlowContext& ctx, double t, const Field& psi) {
  const MetricField ref = checked_metric(reference_form(ctx, t, psi), t);
  return real_part(log_det_ratio(ref, ctx));
}

}  // namespace

double step_potential(FlowState& state, const FlowContext& ctx, double dt,
                      bool enforce_stability) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  double bound = std::numeric_limits<double>::quiet_NaN();
  if (enforce_stability) {
    bound = stability_bound(state.g, chern_ricci(state.g), Integrator::rk4);
    if (dt > bound * (1.0 + 1e-12)) throw StabilityViolation(dt, bound);
  }
  const double t = state.t;
  const Field k1 = potential_rate(ctx, t, state.psi);
  const Field k2 = potential_rate(ctx, t + 0.5 * dt, axpy(state.psi, 0.5 * dt, k1));
  const Field k3 = potential_rate(ctx, t + 0.5 * dt, axpy(state.psi, 0.5 * dt, k2));
  const Field k4 = potential_rate(ctx, t + dt, axpy(state.psi, dt, k3));
  auto psi = state.psi.values();
  auto a = k1.values(), b = k2.values(), c = k3.values(), d = k4.values();
  for (std::size_t p = 0; p < psi.size(); ++p)
    psi[p] += dt / 6.0 * (a[p] + 2.0 * b[p] + 2.0 * c[p] + d[p]);
  state.t = t + dt;
  state.g = checked_metric(reference_form(ctx, state.t, state.psi), state.t);
  state.psidot = real_part(log_det_ratio(state.g, ctx));
  return bound;
}

// ---------------------------------------------------------------------------

std::vector<double> flow_output_times(const FlowOptions& opt) {
  if (!(opt.t_end > 0.0)) throw std::invalid_argument("flow.t_end must be positive");
  std::vector<double> times;
  for (double t : opt.snapshot_times) {
    if (!(t > 0.0) || t > opt.t_end) throw std::invalid_argument("snapshot time outside (0, t_end]");
    if (!times.empty() && !(t > times.back()))
      throw std::invalid_argument("snapshot times must be strictly increasing");
    times.push_back(t);
  }
  if (times.empty() || times.back() < opt.t_end) times.push_back(opt.t_end);
  return times;
}

namespace {

Snapshot snapshot_of(const FlowState& s, const Field& simpson, const Field& error) {
  return Snapshot{s.t, s.g, s.psi, s.psidot, simpson, error};
}

template <typename Step, typename Bound>
Trajectory integrate(const FlowContext& ctx, const FlowOptions& opt, Step step, Bound bound) {
  const auto times = flow_output_times(opt);
  Trajectory traj;
  FlowState state = initial_state(ctx);
  Field simpson(ctx.g0.grid(), 1);
  Field error(ctx.g0.grid(), 1);
  traj.snapshots.push_back(snapshot_of(state, simpson, error));
  try {
    for (double b : times) {
      const double a = state.t;
      const double dt_max = bound(state);
      const double target = opt.dt > 0.0 ? opt.dt : opt.safety * dt_max;
      if (!(target > 0.0)) throw std::invalid_argument("non-positive time step");
      auto m = static_cast<long>(std::ceil((b - a) / target - 1e-9));
      m = std::max(m, 2L);
      if (m % 2 != 0) ++m;
      const double dt = (b - a) / static_cast<double>(m);

      const Field rate_a = psidot_rate(state.g);
      Field f0 = state.psidot;
      Field f1;
      for (long k = 0; k < m; ++k) {
        double dt_bound = step(state, dt);
        if (std::isnan(dt_bound)) dt_bound = dt_max;
        state.t = (k + 1 == m) ? b : a + static_cast<double>(k + 1) * dt;
        traj.steps.push_back({state.t, dt, dt_bound});
        if (k % 2 == 0) {
          f1 = state.psidot;
        } else {
          auto s = simpson.values();
          auto x0 = f0.values(), x1 = f1.values(), x2 = state.psidot.values();
          for (std::size_t p = 0; p < s.size(); ++p)
            s[p] += dt / 3.0 * (x0[p] + 4.0 * x1[p] + x2[p]);
          f0 = state.psidot;
        }
      }
      const Field rate_b = psidot_rate(state.g);
      auto e = error.values();
      auto ra = rate_a.values(), rb = rate_b.values();
      for (std::size_t p = 0; p < e.size(); ++p) e[p] += dt * dt / 12.0 * (rb[p] - ra[p]);
      traj.snapshots.push_back(snapshot_of(state, simpson, error));
    }
  } catch (const FlowBreakdown& br) {
    traj.broke_down = true;
    traj.breakdown_time = br.time();
    traj.breakdown_point = br.point();
    traj.breakdown_message = br.what();
  }
  return traj;
}

}  // namespace

Trajectory integrate_metric_flow(const FlowContext& ctx, const FlowOptions& opt) {
  return integrate(
      ctx, opt,
      [&](FlowState& s, double dt) {
        return step_metric(s, ctx, dt, opt.integrator, opt.enforce_stability);
      },
      [&](const FlowState& s) { return stability_bound(s.g, chern_ricci(s.g), opt.integrator); });
}

Trajectory integrate_potential_flow(const FlowContext& ctx, const FlowOptions& opt) {
  return integrate(
      ctx, opt,
      // The step is chosen from the bound once per output interval.
      [&](FlowState& s, double dt) { return step_potential(s, ctx, dt, false); },
      [&](const FlowState& s) { return stability_bound(s.g, chern_ricci(s.g), Integrator::rk4); });
}

CrossCheck cross_check_formulations(const FlowContext& ctx, const Trajectory& metric,
                                    const Trajectory& potential) {
  if (!metric.snapshots.empty() && !potential.snapshots.empty() &&
      !metric.snapshots.front().g.grid().compatible(potential.snapshots.front().g.grid()))
    throw std::invalid_argument("cross check needs trajectories on the same grid");
  CrossCheck out;
  for (const auto& sm : metric.snapshots) {
    out.reconstruction = std::max(
        out.reconstruction, sup_norm(sm.g.field() - reference_form(ctx, sm.t, sm.psi)));
    for (const auto& sp : potential.snapshots) {
      if (std::abs(sp.t - sm.t) > 1e-12 * std::max(1.0, sm.t)) continue;
      out.formulations = std::max(out.formulations, sup_norm(sm.g.field() - sp.g.field()));
    }
  }
  return out;
}

QuadratureCheck quadrature_check(const Snapshot& s) {
  return {sup_norm(s.psi - s.psi_simpson), sup_norm(s.quadrature_error)};
}

Field laplacian(const MetricField& g, const Field& u) {
  return trace_with_respect_to(g, complex_hessian(u));
}

Field psidot_rate(const MetricField& g) {
  Field r = trace_with_respect_to(g, chern_ricci(g));
  r *= -1.0;
  return r;
}

Field psi_combination(const Snapshot& s) {
  const int n = s.g.dim();
  Field out(s.g.grid(), 1);
  for (std::size_t p = 0; p < out.points(); ++p)
    out.at(0, p) = s.t * s.psidot.at(0, p).real() - s.psi.at(0, p).real() - n * s.t;
  return out;
}

double evolution_residual_psi(const FlowContext& ctx, const Snapshot& s) {
  const int n = s.g.dim();
  const Field Psi = psi_combination(s);
  const Field rate = psidot_rate(s.g);
  const Field lap = laplacian(s.g, Psi);
  const Field tr0 = trace_with_respect_to(s.g, ctx.g0.field());
  double m = 0.0;
  for (std::size_t p = 0; p < Psi.points(); ++p) {
    const double dPsi = s.t * rate.at(0, p).real() - n;
    m = std::max(m, std::abs(dPsi - lap.at(0, p).real() + tr0.at(0, p).real()));
  }
  return m;
}

double evolution_residual_lambda(const FlowContext& ctx, const Snapshot& s, double S1) {
  const int n = s.g.dim();
  Field Lambda(s.g.grid(), 1);
  for (std::size_t p = 0; p < Lambda.points(); ++p)
    Lambda.at(0, p) =
        (S1 - s.t) * s.psidot.at(0, p).real() + s.psi.at(0, p).real() + n * s.t;
  const Field rate = psidot_rate(s.g);
  const Field lap = laplacian(s.g, Lambda);
  const Field trric0 = trace_with_respect_to(s.g, ctx.ric0);
  const Field tr0 = trace_with_respect_to(s.g, ctx.g0.field());
  double m = 0.0;
  for (std::size_t p = 0; p < Lambda.points(); ++p) {
    const double dL = (S1 - s.t) * rate.at(0, p).real() + n;
    const double r = dL - lap.at(0, p).real() + S1 * trric0.at(0, p).real() - tr0.at(0, p).real();
    m = std::max(m, std::abs(r));
  }
  return m;
}

TraceFields trace_fields(const MetricField& h, const MetricField& href) {
  return {trace_with_respect_to(href, h.field()), trace_with_respect_to(h, href.field())};
}

double metric_drift(const Trajectory& traj) {
  double m = 0.0;
  if (traj.snapshots.empty()) return m;
  const Field& g0 = traj.snapshots.front().g.field();
  for (const auto& s : traj.snapshots) m = std::max(m, sup_norm(s.g.field() - g0));
  return m;
}

std::vector<double> real_values(const Field& f) {
  std::vector<double> out(f.points());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = f.at(0, p).real();
  return out;
}

}  // namespace chernlab
