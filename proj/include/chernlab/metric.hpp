#pragma once

// Hermitian metric fields g_{i jbar} and the model families used by the lab.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "chernlab/grid.hpp"
#include "chernlab/hermitian.hpp"

namespace chernlab {

/// Raised when a metric (or a form that must be one) is not positive definite.
class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(const std::string& what, std::size_t point, double min_eigenvalue)
      : std::runtime_error(what + " at point " + std::to_string(point) +
                           " (smallest eigenvalue " + std::to_string(min_eigenvalue) + ")"),
        point_(point), min_eigenvalue_(min_eigenvalue) {}
  std::size_t point() const { return point_; }
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  std::size_t point_;
  double min_eigenvalue_;
};

/// Per-point n x n Hermitian positive-definite matrix field. Component (i*n + j)
/// holds g_{i jbar}. Construction symmetrizes the input (upper triangle wins) so
/// that Hermitian symmetry is exact, then checks positivity.
class MetricField {
 public:
  MetricField() = default;
  explicit MetricField(Field g, bool check_positive = true);

  const Field& field() const { return g_; }
  const ComplexGrid& grid() const { return g_.grid(); }
  int dim() const { return g_.grid().dim(); }
  std::size_t points() const { return g_.points(); }

  SmallMatrix at(std::size_t p) const;

  /// (min, max) eigenvalue over all points.
  EigenPair eigen_range() const;

  /// Throws NotPositiveDefinite naming the first failing point.
  void check_positive(const std::string& label = "metric") const;

 private:
  Field g_;
};

SmallMatrix matrix_at(const Field& f, std::size_t p);
void set_matrix(Field& f, std::size_t p, const SmallMatrix& m);

/// Makes component (j,i) the conjugate of (i,j) and the diagonal real.
void hermitize(Field& f);

/// Smallest/largest eigenvalue of a Hermitian matrix field over the grid, with the
/// point where the minimum occurs.
struct EigenExtent {
  double min;
  double max;
  std::size_t argmin;
};
EigenExtent eigen_extent(const Field& f);

/// log det g per point (real part; imaginary part is round-off for Hermitian input).
Field log_det(const MetricField& g);

/// Pointwise trace tr_a b = a^{i jbar} b_{i jbar}.
Field trace_with_respect_to(const MetricField& a, const Field& b);

MetricField flat_metric(const ComplexGrid& grid);

/// g = lambda * g.
MetricField scaled(const MetricField& g, double lambda);

/// g = delta + d dbar phi with phi a real random band-limited potential whose
/// complex Hessian entries are bounded by `amplitude` (keep amplitude < 1/n).
MetricField kahler_potential_metric(const ComplexGrid& grid, double amplitude, std::uint64_t seed,
                                    int kmax = 1);

/// The potential used by kahler_potential_metric.
Field kahler_potential(const ComplexGrid& grid, double amplitude, std::uint64_t seed, int kmax = 1);

/// g = delta + eps * H with H a random band-limited Hermitian matrix field whose
/// entries are bounded by 1. For n = 2 this is generically not Kahler.
MetricField nonkahler_perturbed_metric(const ComplexGrid& grid, double eps, std::uint64_t seed,
                                       int kmax = 1);

/// n = 2 designated non-Kahler family g = delta + eps * diag(sin(2 pi y2), 0).
MetricField designated_nonkahler_metric(const ComplexGrid& grid, double eps);

/// n = 1 conformally flat metric g = exp(2u).
MetricField conformal_exponential_metric(const Field& u);

/// Block-diagonal n = 2 metric g1(z1) (+) g2(z2) from two n = 1 scalar profiles
/// given as functions of (x, y).
MetricField product_metric(const ComplexGrid& grid,
                           const std::function<double(double, double)>& g1,
                           const std::function<double(double, double)>& g2);

}  // namespace chernlab
