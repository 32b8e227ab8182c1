#pragma once

#include <optional>
#include <vector>

#include "dnspe/combiners.hpp"
#include "dnspe/scenario.hpp"

// Online estimation loops: the general combine-adapt-combine recursion (CTA
// and ATC are its identity-side specializations) and the baselines
// (non-cooperative LMS, incremental NSPE, centralized batch solve).

namespace dnspe {

// Per-node estimate blocks for one algorithm instance, stacked node-wise
// (length total_dim). Rounds are synchronous: all nodes read the
// previous-round buffer, so updates within a round commute.
struct NetworkState {
  Vector q;

  static NetworkState zeros(const InterestLayout& layout) {
    return {Vector::Zero(layout.total_dim)};
  }
};

// One synchronous round of the general form: combine q through the C side
// into phi, LMS-adapt (phi_w, phi_s, xi) against (d, U), combine psi through
// the A side into the new q. Local blocks bypass both combines. When `adapt`
// is set, the A-side weights are recomputed per round from the adaptive rule
// (support of the policy's A side).
NetworkState general_step(const NetworkState& state, const CombinationPolicy& policy,
                          const Topology& t, const InterestLayout& layout,
                          const std::vector<Observation>& obs, const StepSizes& mu,
                          AdaptiveCombinerState* adapt = nullptr);

// General form with C = identity: adapt first, then combine.
NetworkState atc_step(const NetworkState& state, const CombinationPolicy& policy,
                      const Topology& t, const InterestLayout& layout,
                      const std::vector<Observation>& obs, const StepSizes& mu,
                      AdaptiveCombinerState* adapt = nullptr);

// General form with A = identity: combine first, then adapt.
NetworkState cta_step(const NetworkState& state, const CombinationPolicy& policy,
                      const Topology& t, const InterestLayout& layout,
                      const std::vector<Observation>& obs, const StepSizes& mu);

// Per-node standalone LMS, no exchanges.
NetworkState noncoop_step(const NetworkState& state, const InterestLayout& layout,
                          const std::vector<Observation>& obs, const StepSizes& mu);

// Incremental baseline (reconstructed): one network-wide augmented estimate
// passed along the fixed cycle 1..N; each node corrects the blocks it
// observes with reduced step sizes mu/N (global) and mu/|C_j| (common).
struct IncrementalState {
  Vector wbar;  // augmented_dim

  static IncrementalState zeros(const InterestLayout& layout) {
    return {Vector::Zero(layout.augmented_dim)};
  }
};

void incremental_step(IncrementalState& state, int k, const InterestLayout& layout,
                      const Observation& obs, const StepSizes& mu);

// Full cycle over nodes 1..N.
void incremental_cycle(IncrementalState& state, const InterestLayout& layout,
                       const std::vector<Observation>& obs, const StepSizes& mu);

// Node-wise view of the incremental estimate (for shared metrics code).
Vector incremental_stacked(const IncrementalState& state, const InterestLayout& layout);

// Zero-padded placement of node k's regressor into the augmented frame:
// Ubar = U * T_k^T where T_k is the augmented_dim x M_k 0/1 selection.
Matrix augmented_selection(int k, const InterestLayout& layout);

// Population moment of the augmented regressor: T_k Tr(Omega_k) Psi_k T_k^T.
Matrix augmented_moment(int k, const InterestLayout& layout, const RegressorStats& stats);

struct CentralizedResult {
  Vector wbar;     // augmented_dim
  bool singular = false;
  Eigen::Index rank = 0;
};

// Solves (sum_k R_Ubar_k) wbar = sum_k r_Ubar_k,d (the normal equations of
// the augmented problem). Reports rank instead of solving when singular.
CentralizedResult centralized_solve(const Matrix& moment_sum, const Vector& cross_sum);

}  // namespace dnspe
