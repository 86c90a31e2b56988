#pragma once

// Periodic complex torus charts and the holomorphic/antiholomorphic derivative
// operators acting on fields sampled on them.
//
// A grid of complex dimension n has 2n real axes ordered (x1, y1, x2, y2) with
// z^i = x_i + sqrt(-1) y_i, period 1 on every axis and N samples per axis.
// Points are stored row-major with x1 the slowest index.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chernlab {

using cplx = std::complex<double>;

enum class Scheme { spectral, central4 };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

class DerivativeEngine;

class ComplexGrid {
 public:
  ComplexGrid() = default;
  /// Throws std::invalid_argument unless n is 1 or 2 and N >= 8 is even.
  ComplexGrid(int n, int N, Scheme scheme = Scheme::spectral);

  int dim() const { return n_; }
  int resolution() const { return N_; }
  Scheme scheme() const { return scheme_; }
  double spacing() const { return 1.0 / N_; }
  int real_axes() const { return 2 * n_; }
  std::size_t size() const { return size_; }
  bool valid() const { return engine_ != nullptr; }

  /// Same shape and derivative scheme.
  bool compatible(const ComplexGrid& other) const {
    return n_ == other.n_ && N_ == other.N_ && scheme_ == other.scheme_;
  }

  std::size_t stride(int axis) const;
  std::array<int, 4> index(std::size_t point) const;
  std::array<double, 4> position(std::size_t point) const;

  /// Same points, different derivative scheme.
  ComplexGrid with_scheme(Scheme s) const { return ComplexGrid(n_, N_, s); }

  const DerivativeEngine& engine() const { return *engine_; }

 private:
  int n_ = 0;
  int N_ = 0;
  Scheme scheme_ = Scheme::spectral;
  std::size_t size_ = 0;
  std::shared_ptr<DerivativeEngine> engine_;
};

/// Complex-valued field with a fixed number of components per point, stored
/// component-major. Tensor index layouts are documented where tensors are built.
/// Components are separated by a small pad so that equal-index samples of
/// different components do not share cache sets; the pad always holds zeros.
class Field {
 public:
  Field() = default;
  Field(const ComplexGrid& grid, int components, cplx fill = {});

  const ComplexGrid& grid() const { return grid_; }
  int components() const { return components_; }
  std::size_t points() const { return grid_.size(); }

  std::span<cplx> component(int c) {
    return {values_.data() + static_cast<std::size_t>(c) * stride_, points()};
  }
  std::span<const cplx> component(int c) const {
    return {values_.data() + static_cast<std::size_t>(c) * stride_, points()};
  }
  cplx& at(int c, std::size_t p) { return values_[static_cast<std::size_t>(c) * stride_ + p]; }
  cplx at(int c, std::size_t p) const { return values_[static_cast<std::size_t>(c) * stride_ + p]; }

  /// Raw storage including the inter-component pad.
  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(cplx s);

 private:
  ComplexGrid grid_;
  int components_ = 0;
  std::size_t stride_ = 0;
  std::vector<cplx> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx s, Field a);

/// a + s*b, componentwise.
Field axpy(const Field& a, cplx s, const Field& b);

/// Derivative request: d_holo index (or -1) composed with d_antiholo index (or -1).
struct DiffOp {
  int holo = -1;
  int antiholo = -1;
};

/// Owns transform plans and scratch memory for one grid shape. Not thread-safe.
class DerivativeEngine {
 public:
  DerivativeEngine(int n, int N, Scheme scheme);
  ~DerivativeEngine();
  DerivativeEngine(const DerivativeEngine&) = delete;
  DerivativeEngine& operator=(const DerivativeEngine&) = delete;

  /// Applies every op in `ops` to the scalar samples `in`; out[k] receives ops[k].
  void apply(std::span<const cplx> in, std::span<const DiffOp> ops,
             std::span<const std::span<cplx>> out) const;

 private:
  void central_axis(std::span<const cplx> in, int axis, std::span<cplx> out) const;
  void central_holo(std::span<const cplx> in, int i, bool conjugate, std::span<cplx> out) const;

  int n_;
  int N_;
  Scheme scheme_;
  std::size_t size_;
  std::vector<std::size_t> strides_;
  std::vector<double> wavenumber_;  // per axis index, Nyquist mapped to 0
  std::vector<std::vector<cplx>> symbols_;
  mutable std::vector<cplx> scratch_;
  struct FftState;
  std::unique_ptr<FftState> fft_;
};

/// Componentwise d/dz^i = (d/dx_i - sqrt(-1) d/dy_i)/2, i in [0, n).
Field d_holo(const Field& f, int i);
/// Componentwise d/dzbar^i = (d/dx_i + sqrt(-1) d/dy_i)/2.
Field d_antiholo(const Field& f, int i);
/// Componentwise d_i d_jbar.
Field d_mixed(const Field& f, int i, int j);

/// Applies each op to every component; output ordered [op][component].
Field derivatives(const Field& f, std::span<const DiffOp> ops);

/// All first holomorphic derivatives of every component, ordered [i][component].
Field holo_gradient(const Field& f);
/// All first antiholomorphic derivatives, ordered [j][component].
Field antiholo_gradient(const Field& f);

/// Complex Hessian d_i d_jbar u of a scalar field, stored as n*n components (i*n+j).
Field complex_hessian(const Field& u);

/// Largest modulus over all components and points.
double sup_norm(const Field& f);
double sup_norm(std::span<const cplx> values);

/// Least-squares slope of log(error) against log(1/N); positive for convergent
/// schemes. Throws std::invalid_argument with fewer than three resolutions.
double fit_convergence_order(std::span<const int> resolutions, std::span<const double> errors);

/// Evaluates `error_at(N)` for each N and fits the order.
double convergence_order(const std::function<double(int)>& error_at,
                         std::span<const int> resolutions);

/// Samples a function of the real coordinates (x1, y1, x2, y2) on the grid.
Field sample(const ComplexGrid& grid, const std::function<cplx(const std::array<double, 4>&)>& fn);

}  // namespace chernlab
