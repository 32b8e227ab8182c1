#pragma once

#include <string>
#include <vector>

#include "dnspe/blockmat.hpp"
#include "dnspe/scenario.hpp"

// Combination policies (the C/A weight matrices for global and per-cluster
// common estimates), the grouped-to-nodewise permutation and the extended
// weighting matrices that act on the stacked network error vector.

namespace dnspe {

enum class DiffusionMode { kCta, kAtc, kGeneral };

struct CombinationPolicy {
  // N x N global weights; row k supported on N_k.
  Matrix cw, aw;
  // Per cluster j: |C_j| x |C_j| weights indexed by within-cluster rank; row
  // for node k supported on N_k intersect C_j. Local weights are implicitly
  // the identity (no cooperation on locals).
  std::vector<Matrix> cs, as;
  DiffusionMode mode = DiffusionMode::kGeneral;
};

enum class PolicySide { kCombineFirst, kCombineSecond };  // the C / A side

// Uniform weights on the allowed support: 1/|N_k| for the global task,
// 1/|N_k intersect C_j| per cluster. Both C and A sides are populated
// identically; cta_step/atc_step replace one side with the identity.
CombinationPolicy uniform_policy(const Topology& t, const InterestLayout& layout);

CombinationPolicy identity_policy(const InterestLayout& layout);

struct PolicyViolation {
  std::string what;
};

struct PolicyDiagnostics {
  std::vector<PolicyViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks support (weights only where the topology and cluster structure allow
// them) and row-stochasticity to 1e-12 on both sides.
PolicyDiagnostics validate_policy(const CombinationPolicy& p, const Topology& t,
                                  const InterestLayout& layout);

// The permutation P with P * x_grouped arranged node-wise; the extended
// matrices satisfy A_ext = P * blockdiag{A^w (x) I_Mg, A^{s_j} (x) I_Mc, I} * P^T.
Matrix build_permutation(const InterestLayout& layout);

// Extended weighting matrix, assembled block-row by block-row.
Matrix extend_policy_direct(PolicySide side, const CombinationPolicy& p,
                            const InterestLayout& layout);

// Alternative construction through the permutation; equals
// extend_policy_direct entrywise.
Matrix extend_policy_permuted(PolicySide side, const CombinationPolicy& p,
                              const InterestLayout& layout, const Matrix& perm);

// Adaptive combination weights: per task, gamma2[k][l] tracks a smoothed
// squared distance between neighbor l's fresh estimate and node k's previous
// fused one; weights are gamma^{-2} normalized over the allowed support.
struct AdaptiveCombinerState {
  double nu = 0.1;
  double floor = 1e-8;
  Matrix gamma2_global;              // N x N, support of N_k
  std::vector<Matrix> gamma2_common; // per cluster, |C_j| x |C_j|

  static AdaptiveCombinerState init(const InterestLayout& layout, double nu = 0.1);
};

// One recursion step for one (node, task) row: updates gamma2 in place and
// returns the normalized weights for the allowed neighbors, in the order of
// `neighbors`. `distances2[i]` = ||psi_neighbor_i - phi_prev||^2.
std::vector<double> adaptive_update(double nu, double floor,
                                    Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> gamma2_row,
                                    const std::vector<int>& neighbors,
                                    const std::vector<double>& distances2);

}  // namespace dnspe
