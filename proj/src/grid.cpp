#include "chernlab/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chernlab {

std::string to_string(Scheme s) { return s == Scheme::spectral ? "spectral" : "central4"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "spectral") return Scheme::spectral;
  if (name == "central4") return Scheme::central4;
  throw std::invalid_argument("unknown derivative scheme '" + name + "'");
}

ComplexGrid::ComplexGrid(int n, int N, Scheme scheme) : n_(n), N_(N), scheme_(scheme) {
  if (n != 1 && n != 2) throw std::invalid_argument("complex dimension must be 1 or 2");
  if (N < 8 || N % 2 != 0) throw std::invalid_argument("grid resolution must be even and >= 8");
  size_ = 1;
  for (int a = 0; a < 2 * n; ++a) size_ *= static_cast<std::size_t>(N);
  engine_ = std::make_shared<DerivativeEngine>(n, N, scheme);
}

std::size_t ComplexGrid::stride(int axis) const {
  std::size_t s = 1;
  for (int a = 2 * n_ - 1; a > axis; --a) s *= static_cast<std::size_t>(N_);
  return s;
}

std::array<int, 4> ComplexGrid::index(std::size_t point) const {
  std::array<int, 4> idx{0, 0, 0, 0};
  for (int a = 2 * n_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(point % static_cast<std::size_t>(N_));
    point /= static_cast<std::size_t>(N_);
  }
  return idx;
}

std::array<double, 4> ComplexGrid::position(std::size_t point) const {
  auto idx = index(point);
  std::array<double, 4> x{0, 0, 0, 0};
  for (int a = 0; a < 2 * n_; ++a) x[a] = idx[a] * spacing();
  return x;
}

// ---------------------------------------------------------------------------

Field::Field(const ComplexGrid& grid, int components, cplx fill)
    : grid_(grid), components_(components), stride_(grid.size() + 4),
      values_(static_cast<std::size_t>(components) * stride_) {
  if (fill != cplx(0.0, 0.0))
    for (int c = 0; c < components; ++c) std::fill(component(c).begin(), component(c).end(), fill);
}

Field& Field::operator+=(const Field& other) {
  if (other.values_.size() != values_.size()) throw std::invalid_argument("field shape mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  if (other.values_.size() != values_.size()) throw std::invalid_argument("field shape mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

Field& Field::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx s, Field a) { return a *= s; }

Field axpy(const Field& a, cplx s, const Field& b) {
  if (a.values().size() != b.values().size()) throw std::invalid_argument("field shape mismatch");
  Field out = a;
  auto o = out.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] += s * bv[k];
  return out;
}

// ---------------------------------------------------------------------------

struct DerivativeEngine::FftState {
  fftw_complex* buffer = nullptr;
  fftw_complex* spectrum = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

DerivativeEngine::DerivativeEngine(int n, int N, Scheme scheme)
    : n_(n), N_(N), scheme_(scheme), size_(1), strides_(2 * n) {
  for (int a = 0; a < 2 * n; ++a) size_ *= static_cast<std::size_t>(N);
  std::size_t s = 1;
  for (int a = 2 * n - 1; a >= 0; --a) {
    strides_[a] = s;
    s *= static_cast<std::size_t>(N);
  }
  wavenumber_.resize(N);
  for (int m = 0; m < N; ++m) {
    int k = m <= N / 2 ? m : m - N;
    wavenumber_[m] = (m == N / 2) ? 0.0 : static_cast<double>(k);
  }
  if (scheme_ == Scheme::spectral) {
    // Fourier symbols of d/dz^i (entries 0..n-1) and d/dzbar^i (entries n..2n-1).
    const double pi = std::numbers::pi;
    symbols_.assign(2 * n, std::vector<cplx>(size_));
    for (std::size_t p = 0; p < size_; ++p) {
      for (int i = 0; i < n; ++i) {
        const double kx = wavenumber_[(p / strides_[2 * i]) % N];
        const double ky = wavenumber_[(p / strides_[2 * i + 1]) % N];
        symbols_[i][p] = cplx(pi * ky, pi * kx);
        symbols_[n + i][p] = cplx(-pi * ky, pi * kx);
      }
    }
    fft_ = std::make_unique<FftState>();
    fft_->buffer = fftw_alloc_complex(size_);
    fft_->spectrum = fftw_alloc_complex(size_);
    std::vector<int> dims(2 * n, N);
    fft_->forward = fftw_plan_dft(2 * n, dims.data(), fft_->buffer, fft_->buffer, FFTW_FORWARD,
                                  FFTW_ESTIMATE);
    fft_->backward = fftw_plan_dft(2 * n, dims.data(), fft_->buffer, fft_->buffer,
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
  }
}

DerivativeEngine::~DerivativeEngine() {
  if (fft_) {
    fftw_destroy_plan(fft_->forward);
    fftw_destroy_plan(fft_->backward);
    fftw_free(fft_->buffer);
    fftw_free(fft_->spectrum);
  }
}

void DerivativeEngine::apply(std::span<const cplx> in, std::span<const DiffOp> ops,
                             std::span<const std::span<cplx>> out) const {
  for (const auto& op : ops) {
    if (op.holo >= n_ || op.antiholo >= n_ || op.holo < -1 || op.antiholo < -1)
      throw std::out_of_range("derivative axis out of range");
  }
  if (scheme_ == Scheme::central4) {
    std::vector<cplx> tmp(size_);
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const auto& op = ops[k];
      if (op.antiholo >= 0 && op.holo >= 0) {
        central_holo(in, op.antiholo, true, tmp);
        central_holo(tmp, op.holo, false, out[k]);
      } else if (op.antiholo >= 0) {
        central_holo(in, op.antiholo, true, out[k]);
      } else if (op.holo >= 0) {
        central_holo(in, op.holo, false, out[k]);
      } else {
        std::copy(in.begin(), in.end(), out[k].begin());
      }
    }
    return;
  }

  auto* buf = reinterpret_cast<cplx*>(fft_->buffer);
  auto* spec = reinterpret_cast<cplx*>(fft_->spectrum);
  std::copy(in.begin(), in.end(), buf);
  fftw_execute(fft_->forward);
  std::copy(buf, buf + size_, spec);

  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const auto& op = ops[k];
    const cplx* sh = op.holo >= 0 ? symbols_[op.holo].data() : nullptr;
    const cplx* sa = op.antiholo >= 0 ? symbols_[n_ + op.antiholo].data() : nullptr;
    if (sh && sa) {
      for (std::size_t p = 0; p < size_; ++p) buf[p] = spec[p] * sh[p] * sa[p] * scale;
    } else if (sh || sa) {
      const cplx* s = sh ? sh : sa;
      for (std::size_t p = 0; p < size_; ++p) buf[p] = spec[p] * s[p] * scale;
    } else {
      for (std::size_t p = 0; p < size_; ++p) buf[p] = spec[p] * scale;
    }
    fftw_execute(fft_->backward);
    std::copy(buf, buf + size_, out[k].begin());
  }
}

void DerivativeEngine::central_axis(std::span<const cplx> in, int axis,
                                    std::span<cplx> out) const {
  const std::size_t s = strides_[axis];
  const std::size_t N = static_cast<std::size_t>(N_);
  const std::size_t block = N * s;
  const double inv = static_cast<double>(N_) / 12.0;
  for (std::size_t base = 0; base < size_; base += block) {
    const cplx* f = in.data() + base;
    cplx* o = out.data() + base;
    for (std::size_t m = 0; m < N; ++m) {
      const cplx* p1 = f + ((m + 1) % N) * s;
      const cplx* p2 = f + ((m + 2) % N) * s;
      const cplx* m1 = f + ((m + N - 1) % N) * s;
      const cplx* m2 = f + ((m + N - 2) % N) * s;
      cplx* dst = o + m * s;
      for (std::size_t r = 0; r < s; ++r) dst[r] = inv * (-p2[r] + 8.0 * p1[r] - 8.0 * m1[r] + m2[r]);
    }
  }
}

void DerivativeEngine::central_holo(std::span<const cplx> in, int i, bool conjugate,
                                    std::span<cplx> out) const {
  std::vector<cplx>& dy = scratch_;
  dy.resize(size_);
  central_axis(in, 2 * i, out);
  central_axis(in, 2 * i + 1, dy);
  const cplx iy = conjugate ? cplx(0, 0.5) : cplx(0, -0.5);
  for (std::size_t p = 0; p < size_; ++p) out[p] = 0.5 * out[p] + iy * dy[p];
}

// ---------------------------------------------------------------------------

namespace {

Field apply_componentwise(const Field& f, std::span<const DiffOp> ops) {
  const int c = f.components();
  const int m = static_cast<int>(ops.size());
  Field out(f.grid(), c * m);
  std::vector<std::span<cplx>> spans(m);
  for (int comp = 0; comp < c; ++comp) {
    for (int k = 0; k < m; ++k) spans[k] = out.component(k * c + comp);
    f.grid().engine().apply(f.component(comp), ops, spans);
  }
  return out;
}

}  // namespace

Field derivatives(const Field& f, std::span<const DiffOp> ops) { return apply_componentwise(f, ops); }

Field d_holo(const Field& f, int i) {
  if (i < 0 || i >= f.grid().dim()) throw std::out_of_range("holomorphic axis out of range");
  const DiffOp op{i, -1};
  return apply_componentwise(f, {&op, 1});
}

Field d_antiholo(const Field& f, int i) {
  if (i < 0 || i >= f.grid().dim()) throw std::out_of_range("antiholomorphic axis out of range");
  const DiffOp op{-1, i};
  return apply_componentwise(f, {&op, 1});
}

Field d_mixed(const Field& f, int i, int j) {
  const int n = f.grid().dim();
  if (i < 0 || i >= n || j < 0 || j >= n) throw std::out_of_range("derivative axis out of range");
  const DiffOp op{i, j};
  return apply_componentwise(f, {&op, 1});
}

Field holo_gradient(const Field& f) {
  std::vector<DiffOp> ops;
  for (int i = 0; i < f.grid().dim(); ++i) ops.push_back({i, -1});
  return apply_componentwise(f, ops);
}

Field antiholo_gradient(const Field& f) {
  std::vector<DiffOp> ops;
  for (int j = 0; j < f.grid().dim(); ++j) ops.push_back({-1, j});
  return apply_componentwise(f, ops);
}

Field complex_hessian(const Field& u) {
  if (u.components() != 1) throw std::invalid_argument("complex_hessian expects a scalar field");
  std::vector<DiffOp> ops;
  const int n = u.grid().dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ops.push_back({i, j});
  return apply_componentwise(u, ops);
}

double sup_norm(std::span<const cplx> values) {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

double sup_norm(const Field& f) { return sup_norm(f.values()); }

double fit_convergence_order(std::span<const int> resolutions, std::span<const double> errors) {
  if (resolutions.size() < 3 || errors.size() != resolutions.size())
    throw std::invalid_argument("convergence order needs at least three resolutions");
  const double m = static_cast<double>(resolutions.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < resolutions.size(); ++k) {
    const double x = std::log(static_cast<double>(resolutions[k]));
    const double y = std::log(errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return -slope;
}

double convergence_order(const std::function<double(int)>& error_at,
                         std::span<const int> resolutions) {
  if (resolutions.size() < 3)
    throw std::invalid_argument("convergence order needs at least three resolutions");
  std::vector<double> errors;
  for (int N : resolutions) errors.push_back(error_at(N));
  return fit_convergence_order(resolutions, errors);
}

Field sample(const ComplexGrid& grid,
             const std::function<cplx(const std::array<double, 4>&)>& fn) {
  Field out(grid, 1);
  for (std::size_t p = 0; p < grid.size(); ++p) out.at(0, p) = fn(grid.position(p));
  return out;
}

}  // namespace chernlab
