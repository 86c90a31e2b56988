#include "chernlab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chernlab/random.hpp"

namespace chernlab {

SmallMatrix matrix_at(const Field& f, std::size_t p) {
  const int n = f.grid().dim();
  SmallMatrix m{n, {}};
  for (int c = 0; c < n * n; ++c) m.a[c] = f.at(c, p);
  return m;
}

void set_matrix(Field& f, std::size_t p, const SmallMatrix& m) {
  for (int c = 0; c < m.n * m.n; ++c) f.at(c, p) = m.a[c];
}

void hermitize(Field& f) {
  const int n = f.grid().dim();
  for (std::size_t p = 0; p < f.points(); ++p) {
    for (int i = 0; i < n; ++i) {
      f.at(i * n + i, p) = f.at(i * n + i, p).real();
      for (int j = i + 1; j < n; ++j) f.at(j * n + i, p) = std::conj(f.at(i * n + j, p));
    }
  }
}

EigenExtent eigen_extent(const Field& f) {
  EigenExtent e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                0};
  for (std::size_t p = 0; p < f.points(); ++p) {
    const auto ev = hermitian_eigenvalues(matrix_at(f, p));
    if (ev.min < e.min) {
      e.min = ev.min;
      e.argmin = p;
    }
    e.max = std::max(e.max, ev.max);
  }
  return e;
}

MetricField::MetricField(Field g, bool check) : g_(std::move(g)) {
  const int n = g_.grid().dim();
  if (g_.components() != n * n) throw std::invalid_argument("metric field needs n*n components");
  hermitize(g_);
  if (check) check_positive();
}

SmallMatrix MetricField::at(std::size_t p) const { return matrix_at(g_, p); }

EigenPair MetricField::eigen_range() const {
  const auto e = eigen_extent(g_);
  return {e.min, e.max};
}

void MetricField::check_positive(const std::string& label) const {
  for (std::size_t p = 0; p < points(); ++p) {
    const auto ev = hermitian_eigenvalues(at(p));
    if (!(ev.min > 0.0)) throw NotPositiveDefinite(label + " not positive definite", p, ev.min);
  }
}

Field log_det(const MetricField& g) {
  Field out(g.grid(), 1);
  for (std::size_t p = 0; p < g.points(); ++p) {
    const double d = det(g.at(p)).real();
    if (!(d > 0.0)) throw NotPositiveDefinite("non-positive determinant", p, d);
    out.at(0, p) = std::log(d);
  }
  return out;
}

Field trace_with_respect_to(const MetricField& a, const Field& b) {
  const int n = a.dim();
  Field out(a.grid(), 1);
  for (std::size_t p = 0; p < a.points(); ++p) {
    const auto ainv = inverse_metric(a.at(p));
    cplx s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += ainv(i, j) * b.at(i * n + j, p);
    out.at(0, p) = s.real();
  }
  return out;
}

MetricField flat_metric(const ComplexGrid& grid) {
  const int n = grid.dim();
  Field g(grid, n * n);
  for (int i = 0; i < n; ++i)
    for (auto& v : g.component(i * n + i)) v = 1.0;
  return MetricField(std::move(g));
}

MetricField scaled(const MetricField& g, double lambda) {
  Field f = g.field();
  f *= lambda;
  return MetricField(std::move(f));
}

Field kahler_potential(const ComplexGrid& grid, double amplitude, std::uint64_t seed, int kmax) {
  return random_trig_field(grid, seed, "kahler_potential", kmax, amplitude, true, Weight::hessian);
}

MetricField kahler_potential_metric(const ComplexGrid& grid, double amplitude, std::uint64_t seed,
                                    int kmax) {
  const int n = grid.dim();
  Field g = complex_hessian(kahler_potential(grid, amplitude, seed, kmax));
  for (int i = 0; i < n; ++i)
    for (auto& v : g.component(i * n + i)) v += 1.0;
  return MetricField(std::move(g));
}

MetricField nonkahler_perturbed_metric(const ComplexGrid& grid, double eps, std::uint64_t seed,
                                       int kmax) {
  const int n = grid.dim();
  Field g(grid, n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const std::string name = "metric_entry_" + std::to_string(i) + std::to_string(j);
      Field h = random_trig_field(grid, seed, name, kmax, 1.0, i == j);
      auto dst = g.component(i * n + j);
      auto src = h.component(0);
      for (std::size_t p = 0; p < grid.size(); ++p) dst[p] = (i == j ? 1.0 : 0.0) + eps * src[p];
    }
  }
  return MetricField(std::move(g));
}

MetricField designated_nonkahler_metric(const ComplexGrid& grid, double eps) {
  if (grid.dim() != 2) throw std::invalid_argument("designated non-Kahler family needs n = 2");
  Field g(grid, 4);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto x = grid.position(p);
    g.at(0, p) = 1.0 + eps * std::sin(2.0 * std::numbers::pi * x[3]);
    g.at(3, p) = 1.0;
  }
  return MetricField(std::move(g));
}

MetricField conformal_exponential_metric(const Field& u) {
  if (u.grid().dim() != 1) throw std::invalid_argument("exp(2u) family needs n = 1");
  Field g(u.grid(), 1);
  for (std::size_t p = 0; p < u.points(); ++p) g.at(0, p) = std::exp(2.0 * u.at(0, p).real());
  return MetricField(std::move(g));
}

MetricField product_metric(const ComplexGrid& grid,
                           const std::function<double(double, double)>& g1,
                           const std::function<double(double, double)>& g2) {
  if (grid.dim() != 2) throw std::invalid_argument("product metric needs n = 2");
  Field g(grid, 4);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto x = grid.position(p);
    g.at(0, p) = g1(x[0], x[1]);
    g.at(3, p) = g2(x[2], x[3]);
  }
  return MetricField(std::move(g));
}

}  // namespace chernlab
