#pragma once

// Chern connection, torsion, curvature and Chern-Ricci form of a Hermitian metric.
//
// Component layouts (n = complex dimension, all indices in [0, n)):
//   connection   Gamma^k_{ij}              (k*n + i)*n + j
//   torsion      T^k_{ij}                  (k*n + i)*n + j
//   curvature    R_{i jbar k}^l            ((i*n + j)*n + k)*n + l
//   curvature    R_{i jbar k lbar}         ((i*n + j)*n + k)*n + l
//   Ricci        R_{i jbar}                i*n + j
//   dbar torsion d_{mbar} T^k_{ij}         ((m*n + k)*n + i)*n + j
//
// Grid routines differentiate fields with the grid's scheme: Gamma = g^{-1} dg,
// R = -dbar Gamma, Ric = -d dbar log det g. The jet routines evaluate the same
// objects from pointwise derivative data with closed formulas.

#include <array>
#include <cstdint>
#include <vector>

#include "chernlab/grid.hpp"
#include "chernlab/hermitian.hpp"
#include "chernlab/metric.hpp"

namespace chernlab {

inline int idx3(int n, int a, int b, int c) { return (a * n + b) * n + c; }
inline int idx4(int n, int a, int b, int c, int d) { return ((a * n + b) * n + c) * n + d; }

/// g^{k lbar} at every point, layout k*n + l.
Field inverse_metric_field(const MetricField& g);

/// Gamma^k_{ij} = g^{k lbar} d_i g_{j lbar}. Throws NotPositiveDefinite on a
/// singular point.
Field christoffel(const MetricField& g);

/// T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}.
Field torsion_tensor(const Field& gamma);

/// d_{lbar} T^k_{ij}. The Chern connection acts trivially in antiholomorphic
/// directions on (1,0) indices, so this is also nabla_{lbar} T.
Field dbar_torsion(const Field& torsion);

/// R_{i jbar k}^l = -d_{jbar} Gamma^l_{ik}.
Field curvature_up(const Field& gamma);

/// R_{i jbar k lbar} = g_{p lbar} R_{i jbar k}^p.
Field lower_curvature(const MetricField& g, const Field& curvature_up);

/// R_{i jbar} = -d_i d_jbar log det g.
Field chern_ricci(const MetricField& g);

/// g^{k lbar} R_{i jbar k lbar} (equals the Chern-Ricci form).
Field ricci_contraction(const MetricField& g, const Field& curvature);
/// g^{k lbar} R_{k lbar i jbar} (differs from Ric when g is not Kahler).
Field ricci_other_contraction(const MetricField& g, const Field& curvature);

/// |T|_g at one point: square root of the sum of squared components in a g-unitary frame.
double torsion_norm_at(const SmallMatrix& g, std::span<const cplx> torsion);
/// |dbar T|_g at one point, same convention with the extra antiholomorphic index.
double dbar_torsion_norm_at(const SmallMatrix& g, std::span<const cplx> dbar_torsion);

/// Gathers all components of a field at one point.
std::vector<cplx> components_at(const Field& f, std::size_t p);

struct ChernPackage {
  MetricField g;
  Field ginv;
  Field gamma;
  Field torsion;
  Field dbar_torsion;
  Field curvature_up;
  Field curvature;  // lowered R_{i jbar k lbar}
  Field ricci;      // -d dbar log det g
  Field ricci_contracted;
  Field ricci_other;
  double torsion_sup = 0.0;
  double dbar_torsion_sup = 0.0;
};

ChernPackage chern_package(const MetricField& g);

/// Pointwise sup of |T|_g and |dbar T|_g over the grid (optionally restricted by mask).
struct TorsionNorms {
  double torsion_sup = 0.0;
  double dbar_torsion_sup = 0.0;
};
TorsionNorms torsion_norms(const Field& g, const Field& torsion, const Field& dbar_torsion,
                           const std::vector<std::uint8_t>* mask = nullptr);

/// sup |d_k g_{i jbar} - d_i g_{k jbar}|: vanishes exactly when the Kahler form is closed.
double kahler_defect(const MetricField& g);

// -- pointwise jets ---------------------------------------------------------

/// Derivative data of a metric at one point: h_{j lbar}, d_i h_{j lbar} at
/// idx3(i, j, l), and d_i d_mbar h_{j lbar} at idx4(i, m, j, l).
struct MetricJet {
  SmallMatrix h;
  std::array<cplx, 8> dh{};
  std::array<cplx, 16> ddh{};
};

/// Chern quantities at one point, same layouts as the grid fields.
struct PointGeometry {
  int n = 1;
  std::array<cplx, 8> gamma{};
  std::array<cplx, 8> torsion{};
  std::array<cplx, 16> dbar_torsion{};
  std::array<cplx, 16> curvature_up{};
  std::array<cplx, 16> curvature{};
  std::array<cplx, 4> ricci{};
  double torsion_norm = 0.0;
  double dbar_torsion_norm = 0.0;
};

PointGeometry geometry_from_jet(const MetricJet& jet);

/// First and mixed second derivatives of a smooth metric field, for jet evaluation.
struct MetricDerivatives {
  Field dg;   // [i][component]
  Field ddg;  // [(i*n + m)][component], d_i d_mbar
};
MetricDerivatives metric_derivatives(const MetricField& g);
MetricJet jet_at(const MetricField& g, const MetricDerivatives& d, std::size_t p);

// -- bisectional curvature ----------------------------------------------------

struct BkOptions {
  int sample_budget = 4;       // random unit directions per point
  int refine_iterations = 50;  // projected-gradient steps per start
  int refine_points = 16;      // points refined for each of min and max
  std::uint64_t seed = 0;
};

struct BkExtrema {
  double min = 0.0;
  double max = 0.0;
  std::size_t argmin = 0;
  std::size_t argmax = 0;
};

/// Sampled bounds on R(X,Xbar,X,Xbar)/|X|^4 and R(X,Xbar,Y,Ybar)/(|X|^2|Y|^2)
/// (X orthogonal to Y) over all points. Points outside `mask` (when given) are
/// skipped. Throws std::invalid_argument if sample_budget < 1.
BkExtrema bk_extrema(const Field& g, const Field& curvature, const BkOptions& options,
                     const std::vector<std::uint8_t>* mask = nullptr);
BkExtrema bk_extrema(const ChernPackage& pkg, const BkOptions& options);

/// Curvature components in a g-unitary frame at one point.
std::array<cplx, 16> frame_curvature(const SmallMatrix& g, std::span<const cplx> curvature);

/// R(x, xbar, y, ybar) for frame components and frame vectors x, y.
double frame_bisectional(int n, const std::array<cplx, 16>& rf, const std::array<cplx, 2>& x,
                         const std::array<cplx, 2>& y);

}  // namespace chernlab
