#pragma once

// Closed-form linear algebra for the n x n (n <= 2) matrices that live at each
// grid point. Entry (i, j) of a metric matrix is g_{i jbar}.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace chernlab {

using cplx = std::complex<double>;

struct SmallMatrix {
  int n = 1;
  std::array<cplx, 4> a{};

  cplx& operator()(int i, int j) { return a[i * n + j]; }
  cplx operator()(int i, int j) const { return a[i * n + j]; }

  static SmallMatrix identity(int n) {
    SmallMatrix m{n, {}};
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline cplx det(const SmallMatrix& m) {
  return m.n == 1 ? m(0, 0) : m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

/// Plain matrix inverse; throws std::domain_error on a (numerically) singular matrix.
inline SmallMatrix inverse(const SmallMatrix& m) {
  const cplx d = det(m);
  if (std::abs(d) == 0.0 || !std::isfinite(std::abs(d))) throw std::domain_error("singular matrix");
  SmallMatrix r{m.n, {}};
  if (m.n == 1) {
    r(0, 0) = 1.0 / d;
  } else {
    r(0, 0) = m(1, 1) / d;
    r(1, 1) = m(0, 0) / d;
    r(0, 1) = -m(0, 1) / d;
    r(1, 0) = -m(1, 0) / d;
  }
  return r;
}

/// g^{k lbar} laid out as (k, l), i.e. the conjugate of the matrix inverse, so that
/// sum_l g^{k lbar} g_{j lbar} = delta^k_j.
inline SmallMatrix inverse_metric(const SmallMatrix& g) {
  SmallMatrix r = inverse(g);
  for (auto& v : r.a) v = std::conj(v);
  return r;
}

struct EigenPair {
  double min;
  double max;
};

/// Eigenvalues of a Hermitian matrix (quadratic formula for n = 2).
inline EigenPair hermitian_eigenvalues(const SmallMatrix& m) {
  if (m.n == 1) return {m(0, 0).real(), m(0, 0).real()};
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double half = 0.5 * (a - d);
  const double r = std::sqrt(half * half + std::norm(m(0, 1)));
  const double mid = 0.5 * (a + d);
  return {mid - r, mid + r};
}

/// Columns e_a of the returned matrix form a g-unitary frame: sum g_{i jbar} e_a^i conj(e_b^j) = delta_ab.
inline SmallMatrix unitary_frame(const SmallMatrix& g) {
  SmallMatrix e{g.n, {}};
  const double g00 = g(0, 0).real();
  if (!(g00 > 0.0)) throw std::domain_error("metric not positive definite");
  if (g.n == 1) {
    e(0, 0) = 1.0 / std::sqrt(g00);
    return e;
  }
  // e_0 along the first coordinate direction, e_1 from Gram-Schmidt on the second.
  e(0, 0) = 1.0 / std::sqrt(g00);
  e(1, 0) = 0.0;
  // v = d_2 - <d_2, e_0> e_0 with <X,Y> = g_{i jbar} X^i conj(Y^j).
  const cplx proj = g(1, 0) * std::conj(e(0, 0));
  cplx v0 = -proj * e(0, 0);
  cplx v1 = 1.0;
  const double norm2 = (g(0, 0) * v0 * std::conj(v0) + g(0, 1) * v0 * std::conj(v1) +
                        g(1, 0) * v1 * std::conj(v0) + g(1, 1) * v1 * std::conj(v1))
                           .real();
  if (!(norm2 > 0.0)) throw std::domain_error("metric not positive definite");
  const double s = 1.0 / std::sqrt(norm2);
  e(0, 1) = v0 * s;
  e(1, 1) = v1 * s;
  return e;
}

}  // namespace chernlab
