#pragma once

#include <optional>
#include <vector>

#include "dnspe/combiners.hpp"
#include "dnspe/scenario.hpp"

// Closed-form analysis: mean recursion and step-size bound, second- and
// fourth-order regressor moments, the G/S/F variance operators and the
// steady-state MSD/EMSE values per network, node and block.

namespace dnspe {

struct MomentSet {
  Matrix r_u;       // total_dim x total_dim, blockdiag{Tr(Omega_k) Psi_k}
  Matrix v;         // total_dim x total_dim, blockdiag{Tr(Rv_k Omega_k) Psi_k}
  Matrix step;      // diagonal mu_k I_{M_k}
};

MomentSet build_moments(const InterestLayout& layout, const RegressorStats& stats,
                        const StepSizes& mu);

// B = A_ext (I - M R_U) C_ext.
Matrix mean_matrix(const Matrix& c_ext, const Matrix& a_ext, const MomentSet& moments);

// 2 / lambda_max over node k's per-block second moments (the diagonal
// global/common/local sub-blocks of Tr(Omega_k) Psi_k).
double stability_bound(const InterestLayout& layout, const RegressorStats& stats, int k);

// E{U^T U (x) U^T U} for one matrix-variate normal regressor:
//   Tr(Omega)^2 Psi(x)Psi + Tr(Omega^2) vec(Psi)vec(Psi)^T
//   + Tr(Omega^2) K_(M,M) (Psi(x)Psi).
Matrix fourth_moment_same(const Matrix& psi, const Matrix& omega);

// E{U_l^T U_l (x) U_k^T U_k} for independent nodes k != l.
Matrix fourth_moment_cross(const Matrix& psi_k, const Matrix& omega_k,
                           const Matrix& psi_l, const Matrix& omega_l);

// Dense S/F operators are total_dim^2 square; refuse above this unless the
// caller overrides.
inline constexpr int kDefaultDimCap = 120;

// S = E{D_i^T (x) D_i^T}, assembled blockwise with commutation conjugation.
Matrix build_S(const InterestLayout& layout, const RegressorStats& stats,
               int dim_cap = kDefaultDimCap);

// G = I(x)I - R_U M (x) I - I (x) R_U M [+ S (M(x)M)]. The fourth-order term
// is kept when `s` is provided.
Matrix build_G(const MomentSet& moments, const Matrix* s);

// F = (C_ext^T (x) C_ext^T) G (A_ext^T (x) A_ext^T).
Matrix build_F(const Matrix& c_ext, const Matrix& a_ext, const Matrix& g,
               int dim_cap = kDefaultDimCap);

struct TheoryReport {
  Matrix b_mean;
  double rho_mean = 0.0;
  std::vector<double> mu_max;         // mean-stability step-size bound per node
  double rho_f = 0.0;
  bool mean_square_stable = false;
  double msd_net = 0.0, emse_net = 0.0;
  std::vector<double> msd, emse;                  // per node
  std::vector<std::vector<double>> msd_block;     // per node, per block
                                                  // (global, I_k commons, local)
};

// Full chain: mean matrix, bounds, S/G/F and the steady-state selections.
// One transposed solve of (I - F) serves every MSD/EMSE selection. When
// rho(F) >= 1 the report is flagged unstable and carries no moment numbers.
TheoryReport steady_state(const InterestLayout& layout, const RegressorStats& stats,
                          const CombinationPolicy& policy, const StepSizes& mu,
                          bool use_fourth_order = true, int dim_cap = kDefaultDimCap);

}  // namespace dnspe
