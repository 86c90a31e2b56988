#include "chernlab/chern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "chernlab/random.hpp"

namespace chernlab {

namespace {

SmallMatrix checked_inverse_metric(const SmallMatrix& g, std::size_t p) {
  const auto ev = hermitian_eigenvalues(g);
  if (!(ev.min > 0.0)) throw NotPositiveDefinite("metric not positive definite", p, ev.min);
  return inverse_metric(g);
}

int pow_n(int n, int k) {
  int r = 1;
  for (int a = 0; a < k; ++a) r *= n;
  return r;
}

}  // namespace

std::vector<cplx> components_at(const Field& f, std::size_t p) {
  std::vector<cplx> out(f.components());
  for (int c = 0; c < f.components(); ++c) out[c] = f.at(c, p);
  return out;
}

Field inverse_metric_field(const MetricField& g) {
  const int n = g.dim();
  Field out(g.grid(), n * n);
  for (std::size_t p = 0; p < g.points(); ++p) set_matrix(out, p, checked_inverse_metric(g.at(p), p));
  return out;
}

Field christoffel(const MetricField& g) {
  const int n = g.dim();
  const int n2 = n * n;
  const Field dg = holo_gradient(g.field());
  Field gamma(g.grid(), n2 * n);
  for (std::size_t p = 0; p < g.points(); ++p) {
    const auto A = checked_inverse_metric(g.at(p), p);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          cplx s = 0.0;
          for (int l = 0; l < n; ++l) s += A(k, l) * dg.at(i * n2 + j * n + l, p);
          gamma.at(idx3(n, k, i, j), p) = s;
        }
  }
  return gamma;
}

Field torsion_tensor(const Field& gamma) {
  const int n = gamma.grid().dim();
  Field t(gamma.grid(), n * n * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto out = t.component(idx3(n, k, i, j));
        auto a = gamma.component(idx3(n, k, i, j));
        auto b = gamma.component(idx3(n, k, j, i));
        for (std::size_t p = 0; p < out.size(); ++p) out[p] = a[p] - b[p];
      }
  return t;
}

Field dbar_torsion(const Field& torsion) { return antiholo_gradient(torsion); }

namespace {

Field curvature_from_dbar_gamma(const Field& dbar) {
  const int n = dbar.grid().dim();
  const int n3 = n * n * n;
  Field r(dbar.grid(), n3 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          auto out = r.component(idx4(n, i, j, k, l));
          auto src = dbar.component(j * n3 + idx3(n, l, i, k));
          for (std::size_t p = 0; p < out.size(); ++p) out[p] = -src[p];
        }
  return r;
}

Field torsion_from_dbar_gamma(const Field& dbar) {
  const int n = dbar.grid().dim();
  Field d(dbar.grid(), n * n * n * n);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          auto out = d.component(idx4(n, m, k, i, j));
          auto a = dbar.component(idx4(n, m, k, i, j));
          auto b = dbar.component(idx4(n, m, k, j, i));
          for (std::size_t p = 0; p < out.size(); ++p) out[p] = a[p] - b[p];
        }
  return d;
}

}  // namespace

Field curvature_up(const Field& gamma) { return curvature_from_dbar_gamma(antiholo_gradient(gamma)); }

Field lower_curvature(const MetricField& g, const Field& rup) {
  const int n = g.dim();
  Field r(g.grid(), pow_n(n, 4));
  for (std::size_t p = 0; p < g.points(); ++p) {
    const auto G = g.at(p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            cplx s = 0.0;
            for (int q = 0; q < n; ++q) s += G(q, l) * rup.at(idx4(n, i, j, k, q), p);
            r.at(idx4(n, i, j, k, l), p) = s;
          }
  }
  return r;
}

Field chern_ricci(const MetricField& g) {
  // Only the upper triangle is differentiated; hermitize fills the rest.
  const int n = g.dim();
  std::vector<DiffOp> ops;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) ops.push_back({i, j});
  const Field upper = derivatives(log_det(g), ops);
  Field ric(g.grid(), n * n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++k) {
      auto src = upper.component(k);
      auto dst = ric.component(i * n + j);
      for (std::size_t p = 0; p < src.size(); ++p) dst[p] = -src[p];
    }
  hermitize(ric);
  return ric;
}

Field ricci_contraction(const MetricField& g, const Field& curvature) {
  const int n = g.dim();
  Field out(g.grid(), n * n);
  for (std::size_t p = 0; p < g.points(); ++p) {
    const auto A = inverse_metric(g.at(p));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx s = 0.0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) s += A(k, l) * curvature.at(idx4(n, i, j, k, l), p);
        out.at(i * n + j, p) = s;
      }
  }
  return out;
}

Field ricci_other_contraction(const MetricField& g, const Field& curvature) {
  const int n = g.dim();
  Field out(g.grid(), n * n);
  for (std::size_t p = 0; p < g.points(); ++p) {
    const auto A = inverse_metric(g.at(p));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx s = 0.0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) s += A(k, l) * curvature.at(idx4(n, k, l, i, j), p);
        out.at(i * n + j, p) = s;
      }
  }
  return out;
}

namespace {

// Replaces index `pos` of a rank-`rank` tensor by sum_x W(x, a) t[.. x ..], where
// W(x, a) = M(x, a) or its conjugate.
void transform_index(std::array<cplx, 16>& t, int n, int rank, int pos, const SmallMatrix& M,
                     bool conjugate) {
  int stride = 1;
  for (int r = rank - 1; r > pos; --r) stride *= n;
  int total = 1;
  for (int r = 0; r < rank; ++r) total *= n;
  std::array<cplx, 16> out{};
  for (int idx = 0; idx < total; ++idx) {
    const int a = (idx / stride) % n;
    const int base = idx - a * stride;
    cplx s = 0.0;
    for (int x = 0; x < n; ++x) {
      const cplx w = conjugate ? std::conj(M(x, a)) : M(x, a);
      s += w * t[base + x * stride];
    }
    out[idx] = s;
  }
  t = out;
}

SmallMatrix transpose(const SmallMatrix& m) {
  SmallMatrix r{m.n, {}};
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) r(i, j) = m(j, i);
  return r;
}

double squared_sum(const std::array<cplx, 16>& t, int count) {
  double s = 0.0;
  for (int c = 0; c < count; ++c) s += std::norm(t[c]);
  return s;
}

}  // namespace

double torsion_norm_at(const SmallMatrix& g, std::span<const cplx> t) {
  const int n = g.n;
  const auto E = unitary_frame(g);
  const auto up = transpose(inverse(E));  // up(k, c) = E^{-1}(c, k)
  std::array<cplx, 16> f{};
  std::copy(t.begin(), t.begin() + n * n * n, f.begin());
  transform_index(f, n, 3, 0, up, false);
  transform_index(f, n, 3, 1, E, false);
  transform_index(f, n, 3, 2, E, false);
  return std::sqrt(squared_sum(f, n * n * n));
}

double dbar_torsion_norm_at(const SmallMatrix& g, std::span<const cplx> d) {
  const int n = g.n;
  const auto E = unitary_frame(g);
  const auto up = transpose(inverse(E));
  std::array<cplx, 16> f{};
  std::copy(d.begin(), d.begin() + n * n * n * n, f.begin());
  transform_index(f, n, 4, 0, E, true);
  transform_index(f, n, 4, 1, up, false);
  transform_index(f, n, 4, 2, E, false);
  transform_index(f, n, 4, 3, E, false);
  return std::sqrt(squared_sum(f, n * n * n * n));
}

TorsionNorms torsion_norms(const Field& g, const Field& torsion, const Field& dbar,
                           const std::vector<std::uint8_t>* mask) {
  TorsionNorms out;
  std::array<cplx, 8> t{};
  std::array<cplx, 16> d{};
  for (std::size_t p = 0; p < g.points(); ++p) {
    if (mask && !(*mask)[p]) continue;
    const auto G = matrix_at(g, p);
    for (int c = 0; c < torsion.components(); ++c) t[c] = torsion.at(c, p);
    for (int c = 0; c < dbar.components(); ++c) d[c] = dbar.at(c, p);
    out.torsion_sup = std::max(out.torsion_sup, torsion_norm_at(G, t));
    out.dbar_torsion_sup = std::max(out.dbar_torsion_sup, dbar_torsion_norm_at(G, d));
  }
  return out;
}

ChernPackage chern_package(const MetricField& g) {
  ChernPackage pkg;
  pkg.g = g;
  pkg.ginv = inverse_metric_field(g);
  pkg.gamma = christoffel(g);
  pkg.torsion = torsion_tensor(pkg.gamma);
  {
    const Field dbar_gamma = antiholo_gradient(pkg.gamma);
    pkg.dbar_torsion = torsion_from_dbar_gamma(dbar_gamma);
    pkg.curvature_up = curvature_from_dbar_gamma(dbar_gamma);
  }
  pkg.curvature = lower_curvature(g, pkg.curvature_up);
  pkg.ricci = chern_ricci(g);
  pkg.ricci_contracted = ricci_contraction(g, pkg.curvature);
  pkg.ricci_other = ricci_other_contraction(g, pkg.curvature);
  const auto norms = torsion_norms(g.field(), pkg.torsion, pkg.dbar_torsion);
  pkg.torsion_sup = norms.torsion_sup;
  pkg.dbar_torsion_sup = norms.dbar_torsion_sup;
  return pkg;
}

double kahler_defect(const MetricField& g) {
  const int n = g.dim();
  if (n == 1) return 0.0;
  const int n2 = n * n;
  const Field dg = holo_gradient(g.field());
  double m = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto a = dg.component(k * n2 + i * n + j);
        auto b = dg.component(i * n2 + k * n + j);
        for (std::size_t p = 0; p < a.size(); ++p) m = std::max(m, std::abs(a[p] - b[p]));
      }
  return m;
}

// ---------------------------------------------------------------------------

PointGeometry geometry_from_jet(const MetricJet& jet) {
  const int n = jet.h.n;
  PointGeometry out;
  out.n = n;
  const auto A = inverse_metric(jet.h);

  // d_mbar g^{k lbar} = -g^{k qbar} (d_mbar g_{p qbar}) g^{p lbar},
  // with d_mbar g_{p qbar} = conj(d_m g_{q pbar}).
  std::array<cplx, 8> dA{};  // idx3(m, k, l)
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        cplx s = 0.0;
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q)
            s += A(k, q) * std::conj(jet.dh[idx3(n, m, q, p)]) * A(p, l);
        dA[idx3(n, m, k, l)] = -s;
      }

  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx s = 0.0;
        for (int l = 0; l < n; ++l) s += A(k, l) * jet.dh[idx3(n, i, j, l)];
        out.gamma[idx3(n, k, i, j)] = s;
      }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.torsion[idx3(n, k, i, j)] = out.gamma[idx3(n, k, i, j)] - out.gamma[idx3(n, k, j, i)];

  // d_mbar Gamma^k_{ij}, layout idx4(m, k, i, j).
  std::array<cplx, 16> dgamma{};
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          cplx s = 0.0;
          for (int l = 0; l < n; ++l)
            s += dA[idx3(n, m, k, l)] * jet.dh[idx3(n, i, j, l)] +
                 A(k, l) * jet.ddh[idx4(n, i, m, j, l)];
          dgamma[idx4(n, m, k, i, j)] = s;
        }
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          out.dbar_torsion[idx4(n, m, k, i, j)] =
              dgamma[idx4(n, m, k, i, j)] - dgamma[idx4(n, m, k, j, i)];

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out.curvature_up[idx4(n, i, j, k, l)] = -dgamma[idx4(n, j, l, i, k)];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cplx s = 0.0;
          for (int q = 0; q < n; ++q) s += jet.h(q, l) * out.curvature_up[idx4(n, i, j, k, q)];
          out.curvature[idx4(n, i, j, k, l)] = s;
        }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += A(k, l) * out.curvature[idx4(n, i, j, k, l)];
      out.ricci[i * n + j] = s;
    }
  out.torsion_norm = torsion_norm_at(jet.h, std::span<const cplx>(out.torsion.data(), n * n * n));
  out.dbar_torsion_norm =
      dbar_torsion_norm_at(jet.h, std::span<const cplx>(out.dbar_torsion.data(), n * n * n * n));
  return out;
}

MetricDerivatives metric_derivatives(const MetricField& g) {
  const int n = g.dim();
  const int n2 = n * n;
  MetricDerivatives d;
  d.dg = holo_gradient(g.field());
  d.ddg = Field(g.grid(), n2 * n2);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m) {
      const Field dd = d_mixed(g.field(), i, m);
      for (int c = 0; c < n2; ++c) {
        auto src = dd.component(c);
        std::copy(src.begin(), src.end(), d.ddg.component((i * n + m) * n2 + c).begin());
      }
    }
  return d;
}

MetricJet jet_at(const MetricField& g, const MetricDerivatives& d, std::size_t p) {
  const int n = g.dim();
  const int n2 = n * n;
  MetricJet jet;
  jet.h = g.at(p);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < n2; ++c) jet.dh[i * n2 + c] = d.dg.at(i * n2 + c, p);
  for (int im = 0; im < n2; ++im)
    for (int c = 0; c < n2; ++c) jet.ddh[im * n2 + c] = d.ddg.at(im * n2 + c, p);
  return jet;
}

// ---------------------------------------------------------------------------

std::array<cplx, 16> frame_curvature(const SmallMatrix& g, std::span<const cplx> r) {
  const int n = g.n;
  const auto E = unitary_frame(g);
  std::array<cplx, 16> rf{};
  std::copy(r.begin(), r.begin() + n * n * n * n, rf.begin());
  transform_index(rf, n, 4, 0, E, false);
  transform_index(rf, n, 4, 1, E, true);
  transform_index(rf, n, 4, 2, E, false);
  transform_index(rf, n, 4, 3, E, true);
  return rf;
}

double frame_bisectional(int n, const std::array<cplx, 16>& rf, const std::array<cplx, 2>& x,
                         const std::array<cplx, 2>& y) {
  cplx s = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          s += rf[idx4(n, a, b, c, d)] * x[a] * std::conj(x[b]) * y[c] * std::conj(y[d]);
  return s.real();
}

namespace {

// Unit frame vector x = (cos t, e^{ib} sin t) and its orthogonal partner
// y = (-e^{-ib} sin t, cos t).
struct Direction {
  double t;
  double b;
};

double bk_value(const std::array<cplx, 16>& rf, Direction d, bool holomorphic_sectional) {
  const std::array<cplx, 2> x{std::cos(d.t), std::polar(std::sin(d.t), d.b)};
  if (holomorphic_sectional) return frame_bisectional(2, rf, x, x);
  const std::array<cplx, 2> y{-std::polar(std::sin(d.t), -d.b), std::cos(d.t)};
  return frame_bisectional(2, rf, x, y);
}

double refine(const std::array<cplx, 16>& rf, Direction d, bool holomorphic_sectional,
              double sign, int iterations) {
  auto f = [&](Direction q) { return sign * bk_value(rf, q, holomorphic_sectional); };
  double best = f(d);
  double step = 0.25;
  const double h = 1e-6;
  for (int it = 0; it < iterations; ++it) {
    const double gt = (f({d.t + h, d.b}) - f({d.t - h, d.b})) / (2 * h);
    const double gb = (f({d.t, d.b + h}) - f({d.t, d.b - h})) / (2 * h);
    const double gn = std::hypot(gt, gb);
    if (gn < 1e-14) break;
    bool moved = false;
    for (int tries = 0; tries < 8 && !moved; ++tries) {
      const Direction q{d.t - step * gt / gn, d.b - step * gb / gn};
      const double v = f(q);
      if (v < best) {
        best = v;
        d = q;
        moved = true;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    if (!moved) break;
  }
  return sign * best;
}

std::array<cplx, 16> gather(const Field& f, std::size_t p) {
  std::array<cplx, 16> out{};
  for (int c = 0; c < f.components(); ++c) out[c] = f.at(c, p);
  return out;
}

std::vector<Direction> random_directions(std::uint64_t seed, std::size_t p, int budget) {
  SplitMix64 rng(seed ^ (static_cast<std::uint64_t>(p) * 0xD1B54A32D192ED03ULL), "bisectional");
  std::vector<Direction> out(budget);
  for (auto& d : out) {
    const double u = rng.uniform();
    d.t = std::acos(std::sqrt(u));
    d.b = 2.0 * std::numbers::pi * rng.uniform();
  }
  return out;
}

}  // namespace

BkExtrema bk_extrema(const Field& g, const Field& curvature, const BkOptions& opt,
                     const std::vector<std::uint8_t>* mask) {
  if (opt.sample_budget < 1) throw std::invalid_argument("bisectional sample budget must be >= 1");
  const int n = g.grid().dim();
  const double inf = std::numeric_limits<double>::infinity();
  BkExtrema out{inf, -inf, 0, 0};
  auto update = [&](double v, std::size_t p) {
    if (v < out.min) {
      out.min = v;
      out.argmin = p;
    }
    if (v > out.max) {
      out.max = v;
      out.argmax = p;
    }
  };

  const std::size_t points = g.points();
  if (n == 1) {
    for (std::size_t p = 0; p < points; ++p) {
      if (mask && !(*mask)[p]) continue;
      const double gg = g.at(0, p).real();
      update(curvature.at(0, p).real() / (gg * gg), p);
    }
    return out;
  }

  const Direction frame_starts[] = {{0.0, 0.0}, {std::numbers::pi / 2, 0.0}};
  std::vector<double> base_min(points, inf), base_max(points, -inf);
  std::vector<std::size_t> active;
  for (std::size_t p = 0; p < points; ++p) {
    if (mask && !(*mask)[p]) continue;
    active.push_back(p);
    const auto rf = frame_curvature(matrix_at(g, p), gather(curvature, p));
    for (const auto& d : frame_starts)
      for (bool hs : {true, false}) {
        const double v = bk_value(rf, d, hs);
        base_min[p] = std::min(base_min[p], v);
        base_max[p] = std::max(base_max[p], v);
      }
    update(base_min[p], p);
    update(base_max[p], p);
    for (const auto& d : random_directions(opt.seed, p, opt.sample_budget))
      for (bool hs : {true, false}) update(bk_value(rf, d, hs), p);
  }
  if (active.empty()) return out;

  // Refine at the points whose frame values are most extreme. The choice does
  // not depend on the sample budget, so more samples never loosen the bounds.
  const std::size_t m = std::min<std::size_t>(active.size(), std::max(0, opt.refine_points));
  auto pick = [&](const std::vector<double>& key, bool smallest) {
    std::vector<std::size_t> order = active;
    std::partial_sort(order.begin(), order.begin() + m, order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (key[a] != key[b]) return smallest ? key[a] < key[b] : key[a] > key[b];
                        return a < b;
                      });
    order.resize(m);
    return order;
  };
  for (bool smallest : {true, false}) {
    const double sign = smallest ? 1.0 : -1.0;
    for (std::size_t p : pick(smallest ? base_min : base_max, smallest)) {
      const auto rf = frame_curvature(matrix_at(g, p), gather(curvature, p));
      std::vector<Direction> starts(std::begin(frame_starts), std::end(frame_starts));
      for (const auto& d : random_directions(opt.seed, p, opt.sample_budget)) starts.push_back(d);
      for (const auto& d : starts)
        for (bool hs : {true, false}) update(refine(rf, d, hs, sign, opt.refine_iterations), p);
    }
  }
  return out;
}

BkExtrema bk_extrema(const ChernPackage& pkg, const BkOptions& options) {
  return bk_extrema(pkg.g.field(), pkg.curvature, options);
}

}  // namespace chernlab
