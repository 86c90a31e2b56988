#include "chernlab/identities.hpp"

#include <algorithm>
#include <cmath>

#include "chernlab/random.hpp"

namespace chernlab {

namespace {

Field random_components(const ComplexGrid& grid, std::uint64_t seed, const std::string& name,
                        int count, int kmax) {
  Field out(grid, count);
  for (int c = 0; c < count; ++c) {
    const Field f = random_trig_field(grid, seed, name + "_" + std::to_string(c), kmax, 1.0, false);
    auto src = f.component(0);
    std::copy(src.begin(), src.end(), out.component(c).begin());
  }
  return out;
}

}  // namespace

CommutationResidual commutation_residual(const ChernPackage& pkg, std::uint64_t seed, int kmax) {
  const ComplexGrid& grid = pkg.g.grid();
  const int n = grid.dim();
  const int n2 = n * n;
  const Field X = random_components(grid, seed, "commutation_vector", n, kmax);
  const Field a = random_components(grid, seed, "commutation_form", n, kmax);
  const Field& G = pkg.gamma;
  const Field& R = pkg.curvature_up;
  const std::size_t P = grid.size();

  // Vector field: nabla_i nabla_jbar X^l and nabla_jbar nabla_i X^l.
  const Field dbarX = antiholo_gradient(X);      // [j][l]
  const Field d_dbarX = holo_gradient(dbarX);    // [i][j][l]
  Field nablaX(grid, n2);                         // [i][l]
  const Field dX = holo_gradient(X);              // [i][l]
  for (std::size_t p = 0; p < P; ++p)
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        cplx s = dX.at(i * n + l, p);
        for (int m = 0; m < n; ++m) s += G.at(idx3(n, l, i, m), p) * X.at(m, p);
        nablaX.at(i * n + l, p) = s;
      }
  const Field dbar_nablaX = antiholo_gradient(nablaX);  // [j][i][l]

  // (1,0)-form: nabla_i nabla_jbar a_k and nabla_jbar nabla_i a_k.
  const Field dbarA = antiholo_gradient(a);
  const Field d_dbarA = holo_gradient(dbarA);
  Field nablaA(grid, n2);
  const Field dA = holo_gradient(a);
  for (std::size_t p = 0; p < P; ++p)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        cplx s = dA.at(i * n + k, p);
        for (int m = 0; m < n; ++m) s -= G.at(idx3(n, m, i, k), p) * a.at(m, p);
        nablaA.at(i * n + k, p) = s;
      }
  const Field dbar_nablaA = antiholo_gradient(nablaA);

  CommutationResidual res;
  for (std::size_t p = 0; p < P; ++p)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          cplx lhs = d_dbarX.at(idx3(n, i, j, l), p);
          for (int m = 0; m < n; ++m)
            lhs += G.at(idx3(n, l, i, m), p) * dbarX.at(j * n + m, p);
          lhs -= dbar_nablaX.at(idx3(n, j, i, l), p);
          cplx rhs = 0.0;
          for (int k = 0; k < n; ++k) rhs += R.at(idx4(n, i, j, k, l), p) * X.at(k, p);
          res.vector = std::max(res.vector, std::abs(lhs - rhs));

          // Here l plays the role of the form index k.
          cplx lhs_a = d_dbarA.at(idx3(n, i, j, l), p);
          for (int m = 0; m < n; ++m)
            lhs_a -= G.at(idx3(n, m, i, l), p) * dbarA.at(j * n + m, p);
          lhs_a -= dbar_nablaA.at(idx3(n, j, i, l), p);
          cplx ra = 0.0;
          for (int m = 0; m < n; ++m) ra += R.at(idx4(n, i, j, l, m), p) * a.at(m, p);
          res.form = std::max(res.form, std::abs(lhs_a + ra));
        }
  return res;
}

namespace {

struct BianchiInputs {
  const Field* gamma;
  const Field* torsion;
  const Field* tlow;
  const Field* curvature;
  const Field* dbar_tlow;
  const Field* dR;  // holomorphic then antiholomorphic derivatives
};

template <int n>
std::array<double, 5> bianchi_kernel(const BianchiInputs& in, std::size_t P) {
  constexpr int n3 = n * n * n;
  constexpr int n4 = n3 * n;
  std::array<double, 5> res{};
  std::array<cplx, n3> G{}, T{}, tl{};
  std::array<cplx, n4> R{}, dbt{}, nbt{}, ntc{};
  std::array<cplx, n * n4> d1{}, d2{}, nR{}, nbR{};
  const Field& gamma = *in.gamma;
  const Field& torsion = *in.torsion;
  const Field& tlow = *in.tlow;
  const Field& curvature = *in.curvature;
  const Field& dbar_tlow = *in.dbar_tlow;
  const Field& dR = *in.dR;
  for (std::size_t p = 0; p < P; ++p) {
    for (int c = 0; c < n3; ++c) {
      G[c] = gamma.at(c, p);
      T[c] = torsion.at(c, p);
      tl[c] = tlow.at(c, p);
    }
    for (int c = 0; c < n4; ++c) {
      R[c] = curvature.at(c, p);
      dbt[c] = dbar_tlow.at(c, p);
    }
    for (int c = 0; c < n * n4; ++c) {
      d1[c] = dR.at(c, p);
      d2[c] = dR.at(n * n4 + c, p);
    }

    // nabla_jbar T_{i k lbar} at idx4(j, i, k, l); nabla_i T_{jbar lbar k} at idx4(i, j, l, k).
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            cplx s = dbt[idx4(n, j, i, k, l)];
            for (int m = 0; m < n; ++m) s -= std::conj(G[idx3(n, m, j, l)]) * tl[idx3(n, i, k, m)];
            nbt[idx4(n, j, i, k, l)] = s;
          }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          for (int k = 0; k < n; ++k) {
            cplx s = std::conj(dbt[idx4(n, i, j, l, k)]);
            for (int m = 0; m < n; ++m) s -= G[idx3(n, m, i, k)] * std::conj(tl[idx3(n, j, l, m)]);
            ntc[idx4(n, i, j, l, k)] = s;
          }

    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const cplx r = R[idx4(n, i, j, k, l)];
            const cplx first = r - R[idx4(n, k, j, i, l)] + nbt[idx4(n, j, i, k, l)];
            const cplx second = r - R[idx4(n, i, l, k, j)] + ntc[idx4(n, i, j, l, k)];
            const cplx swap = r - R[idx4(n, k, l, i, j)];
            const cplx swap_a = swap + nbt[idx4(n, j, i, k, l)] + ntc[idx4(n, k, j, l, i)];
            const cplx swap_b = swap + ntc[idx4(n, i, j, l, k)] + nbt[idx4(n, l, i, k, j)];
            res[0] = std::max(res[0], std::abs(first));
            res[1] = std::max(res[1], std::abs(second));
            res[2] = std::max({res[2], std::abs(swap_a), std::abs(swap_b)});
          }

    // Covariant derivatives of the curvature, nabla_q R_{i jbar k lbar} and
    // nabla_qbar R_{i jbar k lbar}, both at q*n4 + idx4(i, j, k, l).
    for (int q = 0; q < n; ++q)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              const int c = q * n4 + idx4(n, i, j, k, l);
              cplx s = d1[c];
              cplx sb = d2[c];
              for (int r = 0; r < n; ++r) {
                s -= G[idx3(n, r, q, i)] * R[idx4(n, r, j, k, l)] +
                     G[idx3(n, r, q, k)] * R[idx4(n, i, j, r, l)];
                sb -= std::conj(G[idx3(n, r, q, j)]) * R[idx4(n, i, r, k, l)] +
                      std::conj(G[idx3(n, r, q, l)]) * R[idx4(n, i, j, k, r)];
              }
              nR[c] = s;
              nbR[c] = sb;
            }
    for (int q = 0; q < n; ++q)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              cplx holo = nR[q * n4 + idx4(n, i, j, k, l)] - nR[i * n4 + idx4(n, q, j, k, l)];
              for (int r = 0; r < n; ++r) holo += T[idx3(n, r, q, i)] * R[idx4(n, r, j, k, l)];
              res[3] = std::max(res[3], std::abs(holo));

              // q is the new antiholomorphic direction, j the one it is swapped with.
              cplx anti = nbR[q * n4 + idx4(n, i, j, k, l)] - nbR[j * n4 + idx4(n, i, q, k, l)];
              for (int s = 0; s < n; ++s)
                anti += std::conj(T[idx3(n, s, q, j)]) * R[idx4(n, i, s, k, l)];
              res[4] = std::max(res[4], std::abs(anti));
            }
  }
  return res;
}

}  // namespace

std::array<double, 5> bianchi_residuals(const ChernPackage& pkg) {
  const ComplexGrid& grid = pkg.g.grid();
  const int n = grid.dim();
  const int n3 = n * n * n;
  const std::size_t P = grid.size();

  // T_{i k lbar} = g_{p lbar} T^p_{ik}.
  Field tlow(grid, n3);
  for (std::size_t p = 0; p < P; ++p) {
    const auto g = pkg.g.at(p);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cplx s = 0.0;
          for (int q = 0; q < n; ++q) s += g(q, l) * pkg.torsion.at(idx3(n, q, i, k), p);
          tlow.at(idx3(n, i, k, l), p) = s;
        }
  }
  // d_i of T_{jbar lbar k} = conj(T_{j l kbar}) is conj(d_ibar T_{j l kbar}).
  const Field dbar_tlow = antiholo_gradient(tlow);  // [j][i][k][l]
  // [op][i][j][k][l] with ops d_0..d_{n-1} then dbar_0..dbar_{n-1}.
  std::vector<DiffOp> ops;
  for (int q = 0; q < n; ++q) ops.push_back({q, -1});
  for (int q = 0; q < n; ++q) ops.push_back({-1, q});
  const Field dRall = derivatives(pkg.curvature, ops);

  const BianchiInputs in{&pkg.gamma, &pkg.torsion, &tlow, &pkg.curvature, &dbar_tlow, &dRall};
  return n == 1 ? bianchi_kernel<1>(in, P) : bianchi_kernel<2>(in, P);
}

double ConformalResidual::max() const { return std::max({connection, torsion, curvature, ricci}); }

ConformalResidual conformal_change_residual(const MetricField& g, const Field& F) {
  const ComplexGrid& grid = g.grid();
  const int n = grid.dim();
  const std::size_t P = grid.size();
  Field hf = g.field();
  for (std::size_t p = 0; p < P; ++p) {
    const double w = std::exp(2.0 * F.at(0, p).real());
    for (int c = 0; c < n * n; ++c) hf.at(c, p) *= w;
  }
  const MetricField h(std::move(hf));

  const ChernPackage pg = chern_package(g);
  const Field gamma_h = christoffel(h);
  const Field torsion_h = torsion_tensor(gamma_h);
  const Field curvature_h = lower_curvature(h, curvature_up(gamma_h));
  const Field ricci_h = chern_ricci(h);

  const Field dF = holo_gradient(F);
  const Field ddF = complex_hessian(F);

  ConformalResidual res;
  for (std::size_t p = 0; p < P; ++p) {
    const double w = std::exp(2.0 * F.at(0, p).real());
    const auto gm = g.at(p);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const int c = idx3(n, k, i, j);
          const cplx Fi = dF.at(i, p), Fj = dF.at(j, p);
          const cplx gamma_pred = pg.gamma.at(c, p) + (j == k ? 2.0 * Fi : 0.0);
          const cplx torsion_pred =
              pg.torsion.at(c, p) + (j == k ? 2.0 * Fi : 0.0) - (i == k ? 2.0 * Fj : 0.0);
          res.connection = std::max(res.connection, std::abs(gamma_h.at(c, p) - gamma_pred));
          res.torsion = std::max(res.torsion, std::abs(torsion_h.at(c, p) - torsion_pred));
        }
    // R~_{k lbar i jbar} = e^{2F} (R_{k lbar i jbar} - 2 g_{i jbar} F_{k lbar}).
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const int c = idx4(n, k, l, i, j);
            const cplx pred = w * (pg.curvature.at(c, p) - 2.0 * gm(i, j) * ddF.at(k * n + l, p));
            res.curvature = std::max(res.curvature, std::abs(curvature_h.at(c, p) - pred));
          }
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const cplx pred = pg.ricci.at(k * n + l, p) - 2.0 * n * ddF.at(k * n + l, p);
        res.ricci = std::max(res.ricci, std::abs(ricci_h.at(k * n + l, p) - pred));
      }
  }
  return res;
}

}  // namespace chernlab
