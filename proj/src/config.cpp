#include "chernlab/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <set>

#include "chernlab/random.hpp"

namespace chernlab {

std::string to_string(MetricFamily f) {
  switch (f) {
    case MetricFamily::flat:
      return "flat";
    case MetricFamily::kahler_potential:
      return "kahler_potential";
    case MetricFamily::nonkahler_perturbed:
      return "nonkahler_perturbed";
    case MetricFamily::conformal_radial:
      return "conformal_radial";
  }
  return "?";
}

bool MonitorConfig::enabled(std::string_view name) const {
  return std::find(list.begin(), list.end(), name) != list.end();
}

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string out;
  for (const auto& i : issues) {
    if (!out.empty()) out += "\n";
    out += i.line > 0 ? fmt::format("line {}: {}", i.line, i.message) : i.message;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (true) {
    const auto c = s.find(',');
    const auto item = trim(s.substr(0, c));
    if (!item.empty()) out.emplace_back(item);
    if (c == std::string_view::npos) break;
    s.remove_prefix(c + 1);
  }
  return out;
}

bool to_double(std::string_view s, double& v) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

template <typename Int>
bool to_int(std::string_view s, Int& v) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool to_bool(std::string_view s, bool& v) {
  if (s == "true") return v = true, true;
  if (s == "false") return v = false, true;
  return false;
}

const std::set<std::string, std::less<>> known_monitors{
    "psi_estimates", "trace_bound", "max_principle", "kahler_defect", "evolution_residuals"};

bool valid_potential(const std::string& p) {
  if (p == "zero") return true;
  if (p.rfind("trig:", 0) != 0) return false;
  const auto rest = std::string_view(p).substr(5);
  const auto c = rest.find(':');
  if (c == std::string_view::npos) return false;
  std::uint64_t seed = 0;
  double amp = 0.0;
  return to_int(rest.substr(0, c), seed) && to_double(rest.substr(c + 1), amp) && amp >= 0.0;
}

// A setter returns an empty string on success and the error message otherwise.
using Setter = std::function<std::string(ScenarioConfig&, std::string_view)>;

template <typename Get>
Setter real_key(std::string key, Get get, std::function<bool(double)> ok, std::string rule) {
  return [=](ScenarioConfig& c, std::string_view v) -> std::string {
    double x = 0.0;
    if (!to_double(v, x)) return key + " must be a number";
    if (!ok(x)) return key + " " + rule;
    get(c) = x;
    return {};
  };
}

template <typename Int, typename Get>
Setter int_key(std::string key, Get get, std::function<bool(Int)> ok, std::string rule) {
  return [=](ScenarioConfig& c, std::string_view v) -> std::string {
    Int x{};
    if (!to_int(v, x)) return key + " must be an integer";
    if (!ok(x)) return key + " " + rule;
    get(c) = x;
    return {};
  };
}

template <typename Get>
Setter bool_key(std::string key, Get get) {
  return [=](ScenarioConfig& c, std::string_view v) -> std::string {
    bool x = false;
    if (!to_bool(v, x)) return key + " must be true or false";
    get(c) = x;
    return {};
  };
}

template <typename Get>
Setter potentials_key(std::string key, Get get) {
  return [=](ScenarioConfig& c, std::string_view v) -> std::string {
    auto items = split_list(v);
    if (items.empty()) return key + " must list at least one potential";
    for (const auto& p : items)
      if (!valid_potential(p)) return key + ": unknown potential '" + p + "'";
    get(c) = items;
    return {};
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const auto table = [] {
    std::map<std::string, Setter, std::less<>> m;
    auto positive = [](double x) { return x > 0.0; };
    auto nonneg = [](double x) { return x >= 0.0; };

    m["grid.n"] = int_key<int>("grid.n", [](ScenarioConfig& c) -> int& { return c.grid.n; },
                               [](int x) { return x == 1 || x == 2; }, "must be 1 or 2");
    m["grid.N"] = int_key<int>("grid.N", [](ScenarioConfig& c) -> int& { return c.grid.N; },
                               [](int x) { return x >= 8 && x % 2 == 0; },
                               "must be an even integer >= 8");
    m["grid.scheme"] = [](ScenarioConfig& c, std::string_view v) -> std::string {
      try {
        c.grid.scheme = scheme_from_string(std::string(v));
      } catch (const std::exception&) {
        return "grid.scheme must be spectral or central4";
      }
      return {};
    };

    m["metric.family"] = [](ScenarioConfig& c, std::string_view v) -> std::string {
      for (auto f : {MetricFamily::flat, MetricFamily::kahler_potential,
                     MetricFamily::nonkahler_perturbed, MetricFamily::conformal_radial})
        if (v == to_string(f)) {
          c.metric.family = f;
          return {};
        }
      return "metric.family must be flat, kahler_potential, nonkahler_perturbed or "
             "conformal_radial";
    };
    m["metric.amplitude"] = real_key(
        "metric.amplitude", [](ScenarioConfig& c) -> double& { return c.metric.amplitude; },
        nonneg, "must be non-negative");
    m["metric.epsilon"] = real_key(
        "metric.epsilon", [](ScenarioConfig& c) -> double& { return c.metric.epsilon; },
        [](double x) { return x >= 0.0 && x < 1.0; }, "must lie in [0, 1)");
    m["metric.seed"] = int_key<std::uint64_t>(
        "metric.seed", [](ScenarioConfig& c) -> std::uint64_t& { return c.metric.seed; },
        [](std::uint64_t) { return true; }, "");
    m["metric.kmax"] = int_key<int>("metric.kmax",
                                    [](ScenarioConfig& c) -> int& { return c.metric.kmax; },
                                    [](int x) { return x >= 1; }, "must be at least 1");
    m["metric.rho0"] = real_key("metric.rho0",
                                [](ScenarioConfig& c) -> double& { return c.metric.rho0; },
                                positive, "must be positive");
    m["metric.radius"] = real_key("metric.radius",
                                  [](ScenarioConfig& c) -> double& { return c.metric.radius; },
                                  positive, "must be positive");
    m["metric.kappa"] = real_key(
        "metric.kappa", [](ScenarioConfig& c) -> double& { return c.metric.kappa; },
        [](double x) { return x > 0.0 && x < 0.125; }, "must lie in (0, 1/8)");

    m["flow.integrator"] = [](ScenarioConfig& c, std::string_view v) -> std::string {
      try {
        c.flow.integrator = integrator_from_string(std::string(v));
      } catch (const std::exception&) {
        return "flow.integrator must be euler or rk4";
      }
      return {};
    };
    m["flow.t_end"] = real_key("flow.t_end",
                               [](ScenarioConfig& c) -> double& { return c.flow.t_end; },
                               positive, "must be positive");
    m["flow.dt"] = real_key("flow.dt", [](ScenarioConfig& c) -> double& { return c.flow.dt; },
                            nonneg, "must be non-negative");
    m["flow.safety"] = real_key(
        "flow.safety", [](ScenarioConfig& c) -> double& { return c.flow.safety; },
        [](double x) { return x > 0.0 && x <= 1.0; }, "must lie in (0, 1]");
    m["flow.enforce_stability"] = bool_key(
        "flow.enforce_stability",
        [](ScenarioConfig& c) -> bool& { return c.flow.enforce_stability; });
    m["flow.snapshots"] = int_key<int>(
        "flow.snapshots", [](ScenarioConfig& c) -> int& { return c.flow.snapshots; },
        [](int x) { return x >= 1; }, "must be at least 1");
    m["flow.snapshot_times"] = [](ScenarioConfig& c, std::string_view v) -> std::string {
      std::vector<double> times;
      for (const auto& item : split_list(v)) {
        double x = 0.0;
        if (!to_double(item, x)) return "flow.snapshot_times must be a list of numbers";
        times.push_back(x);
      }
      c.flow.snapshot_times = times;
      return {};
    };
    m["flow.cross_check"] = bool_key(
        "flow.cross_check", [](ScenarioConfig& c) -> bool& { return c.flow.cross_check; });

    m["monitors.list"] = [](ScenarioConfig& c, std::string_view v) -> std::string {
      auto items = split_list(v);
      for (const auto& i : items)
        if (!known_monitors.contains(i)) return "monitors.list: unknown monitor '" + i + "'";
      c.monitors.list = items;
      return {};
    };
    m["monitors.tolerance"] = real_key(
        "monitors.tolerance", [](ScenarioConfig& c) -> double& { return c.monitors.tolerance; },
        nonneg, "must be non-negative");
    m["monitors.residual_tolerance"] = real_key(
        "monitors.residual_tolerance",
        [](ScenarioConfig& c) -> double& { return c.monitors.residual_tolerance; }, nonneg,
        "must be non-negative");
    m["monitors.kahler_tolerance"] = real_key(
        "monitors.kahler_tolerance",
        [](ScenarioConfig& c) -> double& { return c.monitors.kahler_tolerance; }, nonneg,
        "must be non-negative");
    m["monitors.S1"] = real_key("monitors.S1",
                                [](ScenarioConfig& c) -> double& { return c.monitors.S1; },
                                nonneg, "must be non-negative");
    m["monitors.S2"] = real_key("monitors.S2",
                                [](ScenarioConfig& c) -> double& { return c.monitors.S2; },
                                nonneg, "must be non-negative");
    m["monitors.K"] = real_key("monitors.K", [](ScenarioConfig& c) -> double& { return c.monitors.K; },
                               [](double x) { return x >= 0.0 || x == -1.0; },
                               "must be non-negative (or -1 for the measured value)");
    m["monitors.c1"] = real_key("monitors.c1",
                                [](ScenarioConfig& c) -> double& { return c.monitors.c1; },
                                nonneg, "must be non-negative");
    m["monitors.c2"] = real_key("monitors.c2",
                                [](ScenarioConfig& c) -> double& { return c.monitors.c2; },
                                nonneg, "must be non-negative");
    m["monitors.calibrate"] = bool_key(
        "monitors.calibrate", [](ScenarioConfig& c) -> bool& { return c.monitors.calibrate; });
    m["monitors.heat_offset"] = real_key(
        "monitors.heat_offset",
        [](ScenarioConfig& c) -> double& { return c.monitors.heat_offset; },
        [](double) { return true; }, "");
    m["monitors.heat_amplitude"] = real_key(
        "monitors.heat_amplitude",
        [](ScenarioConfig& c) -> double& { return c.monitors.heat_amplitude; }, nonneg,
        "must be non-negative");
    m["monitors.bk_samples"] = int_key<int>(
        "monitors.bk_samples", [](ScenarioConfig& c) -> int& { return c.monitors.bk_samples; },
        [](int x) { return x >= 1; }, "must be at least 1");
    m["monitors.bk_seed"] = int_key<std::uint64_t>(
        "monitors.bk_seed", [](ScenarioConfig& c) -> std::uint64_t& { return c.monitors.bk_seed; },
        [](std::uint64_t) { return true; }, "");

    for (const std::string kind : {"a2", "a3"}) {
      auto spec = [kind](ScenarioConfig& c) -> CertificateSpec& {
        return kind == "a2" ? c.certificates.a2 : c.certificates.a3;
      };
      const std::string base = "certificates." + kind;
      m[base] = bool_key(base, [spec](ScenarioConfig& c) -> bool& { return spec(c).enabled; });
      m[base + ".S"] = real_key(base + ".S",
                                [spec](ScenarioConfig& c) -> double& { return spec(c).S; },
                                positive, "must be positive");
      m[base + ".beta"] = real_key(base + ".beta",
                                   [spec](ScenarioConfig& c) -> double& { return spec(c).beta; },
                                   positive, "must be positive");
      m[base + ".potentials"] = potentials_key(
          base + ".potentials",
          [spec](ScenarioConfig& c) -> std::vector<std::string>& { return spec(c).potentials; });
    }
    m["certificates.S_max"] = real_key(
        "certificates.S_max", [](ScenarioConfig& c) -> double& { return c.certificates.S_max; },
        positive, "must be positive");

    m["output.dir"] = [](ScenarioConfig& c, std::string_view v) -> std::string {
      c.output_dir = std::string(v);
      return {};
    };
    return m;
  }();
  return table;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig c;
  std::vector<ConfigIssue> issues;
  std::map<std::string, int, std::less<>> seen;
  std::map<std::string, int, std::less<>> key_line;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({line_no, "expected 'key = value'"});
      continue;
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      issues.push_back({line_no, "unknown key '" + std::string(key) + "'"});
      continue;
    }
    if (const auto prev = seen.find(key); prev != seen.end()) {
      issues.push_back({line_no, fmt::format("duplicate key '{}' (first set on line {})", key,
                                             prev->second)});
      continue;
    }
    seen.emplace(std::string(key), line_no);
    if (auto err = it->second(c, value); !err.empty()) issues.push_back({line_no, err});
  }

  auto line_of = [&](std::string_view key) {
    const auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  };
  double prev = 0.0;
  for (double t : c.flow.snapshot_times) {
    if (t < 0.0 || t > c.flow.t_end) {
      issues.push_back({line_of("flow.snapshot_times"), "flow.snapshot_times must lie in [0, t_end]"});
      break;
    }
    if (t < prev) {
      issues.push_back({line_of("flow.snapshot_times"), "flow.snapshot_times must be increasing"});
      break;
    }
    prev = t;
  }
  if (c.metric.family == MetricFamily::kahler_potential && c.metric.amplitude * c.grid.n >= 1.0)
    issues.push_back({line_of("metric.amplitude"),
                      "metric.amplitude must be below 1/n for kahler_potential"});
  if (c.metric.family == MetricFamily::conformal_radial && c.metric.radius >= c.metric.rho0)
    issues.push_back({line_of("metric.radius"), "metric.radius must be below metric.rho0"});
  if (2 * c.metric.kmax >= c.grid.N)
    issues.push_back({line_of("metric.kmax"), "metric.kmax must be below grid.N / 2"});
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

namespace {

std::string num(double x) { return fmt::format("{}", x); }

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace

std::string emit_config(const ScenarioConfig& c) {
  std::string o;
  auto kv = [&](std::string_view k, const std::string& v) { o += fmt::format("{} = {}\n", k, v); };
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  kv("grid.n", std::to_string(c.grid.n));
  kv("grid.N", std::to_string(c.grid.N));
  kv("grid.scheme", to_string(c.grid.scheme));
  kv("metric.family", to_string(c.metric.family));
  kv("metric.amplitude", num(c.metric.amplitude));
  kv("metric.epsilon", num(c.metric.epsilon));
  kv("metric.seed", std::to_string(c.metric.seed));
  kv("metric.kmax", std::to_string(c.metric.kmax));
  kv("metric.rho0", num(c.metric.rho0));
  kv("metric.radius", num(c.metric.radius));
  kv("metric.kappa", num(c.metric.kappa));
  kv("flow.integrator", to_string(c.flow.integrator));
  kv("flow.t_end", num(c.flow.t_end));
  kv("flow.dt", num(c.flow.dt));
  kv("flow.safety", num(c.flow.safety));
  kv("flow.enforce_stability", b(c.flow.enforce_stability));
  kv("flow.snapshots", std::to_string(c.flow.snapshots));
  std::vector<std::string> times;
  for (double t : c.flow.snapshot_times) times.push_back(num(t));
  kv("flow.snapshot_times", join(times));
  kv("flow.cross_check", b(c.flow.cross_check));
  kv("monitors.list", join(c.monitors.list));
  kv("monitors.tolerance", num(c.monitors.tolerance));
  kv("monitors.residual_tolerance", num(c.monitors.residual_tolerance));
  kv("monitors.kahler_tolerance", num(c.monitors.kahler_tolerance));
  kv("monitors.S1", num(c.monitors.S1));
  kv("monitors.S2", num(c.monitors.S2));
  kv("monitors.K", num(c.monitors.K));
  kv("monitors.c1", num(c.monitors.c1));
  kv("monitors.c2", num(c.monitors.c2));
  kv("monitors.calibrate", b(c.monitors.calibrate));
  kv("monitors.heat_offset", num(c.monitors.heat_offset));
  kv("monitors.heat_amplitude", num(c.monitors.heat_amplitude));
  kv("monitors.bk_samples", std::to_string(c.monitors.bk_samples));
  kv("monitors.bk_seed", std::to_string(c.monitors.bk_seed));
  for (const auto& [name, spec] : {std::pair{"a2", &c.certificates.a2}, std::pair{"a3", &c.certificates.a3}}) {
    const std::string base = std::string("certificates.") + name;
    kv(base, b(spec->enabled));
    kv(base + ".S", num(spec->S));
    kv(base + ".beta", num(spec->beta));
    kv(base + ".potentials", join(spec->potentials));
  }
  kv("certificates.S_max", num(c.certificates.S_max));
  kv("output.dir", c.output_dir);
  return o;
}

std::string config_hash(const ScenarioConfig& c) {
  return fmt::format("{:016x}", fnv1a64(emit_config(c)));
}

std::vector<double> snapshot_schedule(const ScenarioConfig& c) {
  std::vector<double> times;
  if (!c.flow.snapshot_times.empty()) {
    for (double t : c.flow.snapshot_times)
      if (t > 0.0 && (times.empty() || t > times.back())) times.push_back(t);
    return times;
  }
  for (int k = 1; k < c.flow.snapshots; ++k)
    times.push_back(c.flow.t_end * static_cast<double>(k) / c.flow.snapshots);
  times.push_back(c.flow.t_end);
  return times;
}

}  // namespace chernlab
