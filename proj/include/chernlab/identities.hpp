#pragma once

// Residuals of the commutation formula, the torsion-corrected Bianchi
// identities and the conformal change laws, measured on a grid.

#include <array>
#include <cstdint>
#include <string>

#include "chernlab/chern.hpp"

namespace chernlab {

struct CommutationResidual {
  double vector = 0.0;  // [nabla_i, nabla_jbar] X^l - R_{i jbar k}^l X^k
  double form = 0.0;    // [nabla_i, nabla_jbar] a_k + R_{i jbar k}^l a_l
  double max() const { return vector > form ? vector : form; }
};

/// Uses random band-limited test fields drawn from `seed`.
CommutationResidual commutation_residual(const ChernPackage& pkg, std::uint64_t seed,
                                         int kmax = 1);

/// Sup norms of the five Bianchi-type residuals:
///   0: R_{i jbar k lbar} - R_{k jbar i lbar} + nabla_jbar T_{i k lbar}
///   1: R_{i jbar k lbar} - R_{i lbar k jbar} + nabla_i T_{jbar lbar k}
///   2: R_{i jbar k lbar} - R_{k lbar i jbar} against both torsion expressions (larger residual)
///   3: nabla_p R_{i jbar k lbar} - nabla_i R_{p jbar k lbar} + T^r_{p i} R_{r jbar k lbar}
///   4: nabla_qbar R_{i jbar k lbar} - nabla_jbar R_{i qbar k lbar} + conj(T^s_{q j}) R_{i sbar k lbar}
/// with T_{i k lbar} = g_{p lbar} T^p_{ik}.
std::array<double, 5> bianchi_residuals(const ChernPackage& pkg);

inline const std::array<std::string, 5>& bianchi_names() {
  static const std::array<std::string, 5> names{"bianchi_first", "bianchi_second",
                                                "bianchi_swap", "bianchi_holomorphic",
                                                "bianchi_antiholomorphic"};
  return names;
}

/// Relative change laws under h = e^{2F} g, comparing the Chern data of h
/// (recomputed from scratch) with the predicted expressions
///   Gamma_h = Gamma_g + 2 dF delta,  T_h = T_g + 2(F_i delta^k_j - F_j delta^k_i),
///   R_h = R_g - 2 F_{i jbar} delta,  Ric_h = Ric_g - 2n dd-bar F.
struct ConformalResidual {
  double connection = 0.0;
  double torsion = 0.0;
  double curvature = 0.0;
  double ricci = 0.0;
  double max() const;
};

ConformalResidual conformal_change_residual(const MetricField& g, const Field& F);

}  // namespace chernlab
