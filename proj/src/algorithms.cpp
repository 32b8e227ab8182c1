#include "dnspe/algorithms.hpp"

#include <Eigen/LU>

namespace dnspe {

namespace {

// C-side combine of the stacked vector `in` (locals bypass).
Vector combine(const Matrix& w, const std::vector<Matrix>& ws, const Vector& in,
               const InterestLayout& layout) {
  Vector out(layout.total_dim);
  const int mg = layout.global_size;
  for (int k = 0; k < layout.num_nodes; ++k) {
    Vector acc = Vector::Zero(mg);
    for (int l = 0; l < layout.num_nodes; ++l)
      if (w(k, l) != 0.0) acc += w(k, l) * in.segment(layout.global_offset(l), mg);
    out.segment(layout.global_offset(k), mg) = acc;
    for (int j : layout.memberships[k]) {
      const int mc = layout.common_size[j];
      const int rk = layout.cluster_rank(j, k);
      Vector cacc = Vector::Zero(mc);
      for (int l : layout.cluster_members[j]) {
        const double wjl = ws[j](rk, layout.cluster_rank(j, l));
        if (wjl != 0.0) cacc += wjl * in.segment(layout.common_offset(l, j), mc);
      }
      out.segment(layout.common_offset(k, j), mc) = cacc;
    }
    out.segment(layout.local_offset(k), layout.local_size[k]) =
        in.segment(layout.local_offset(k), layout.local_size[k]);
  }
  return out;
}

// A-side combine with weights recomputed per round from the adaptive rule.
// `phi_prev` is the fused estimate the adaptation started from this round.
Vector combine_adaptive(AdaptiveCombinerState& adapt, const Topology& t,
                        const Vector& psi, const Vector& phi_prev,
                        const InterestLayout& layout) {
  Vector out(layout.total_dim);
  const int mg = layout.global_size;
  for (int k = 0; k < layout.num_nodes; ++k) {
    const std::vector<int>& nk = t.neighbors[k];
    std::vector<double> dist2(nk.size());
    for (size_t i = 0; i < nk.size(); ++i)
      dist2[i] = (psi.segment(layout.global_offset(nk[i]), mg) -
                  phi_prev.segment(layout.global_offset(k), mg))
                     .squaredNorm();
    std::vector<double> weights = adaptive_update(adapt.nu, adapt.floor,
                                                  adapt.gamma2_global.row(k), nk, dist2);
    Vector acc = Vector::Zero(mg);
    for (size_t i = 0; i < nk.size(); ++i)
      acc += weights[i] * psi.segment(layout.global_offset(nk[i]), mg);
    out.segment(layout.global_offset(k), mg) = acc;

    for (int j : layout.memberships[k]) {
      const int mc = layout.common_size[j];
      const int rk = layout.cluster_rank(j, k);
      std::vector<int> allowed;  // within-cluster ranks of N_k intersect C_j
      for (int l : layout.cluster_members[j])
        if (t.connected(k, l)) allowed.push_back(layout.cluster_rank(j, l));
      std::vector<double> cdist2(allowed.size());
      for (size_t i = 0; i < allowed.size(); ++i) {
        const int l = layout.cluster_members[j][allowed[i]];
        cdist2[i] = (psi.segment(layout.common_offset(l, j), mc) -
                     phi_prev.segment(layout.common_offset(k, j), mc))
                        .squaredNorm();
      }
      std::vector<double> weights2 = adaptive_update(
          adapt.nu, adapt.floor, adapt.gamma2_common[j].row(rk), allowed, cdist2);
      Vector cacc = Vector::Zero(mc);
      for (size_t i = 0; i < allowed.size(); ++i) {
        const int l = layout.cluster_members[j][allowed[i]];
        cacc += weights2[i] * psi.segment(layout.common_offset(l, j), mc);
      }
      out.segment(layout.common_offset(k, j), mc) = cacc;
    }
    out.segment(layout.local_offset(k), layout.local_size[k]) =
        psi.segment(layout.local_offset(k), layout.local_size[k]);
  }
  return out;
}

Vector adapt_all(const Vector& phi, const InterestLayout& layout,
                 const std::vector<Observation>& obs, const StepSizes& mu) {
  Vector psi(layout.total_dim);
  for (int k = 0; k < layout.num_nodes; ++k) {
    const auto seg = phi.segment(layout.node_offset[k], layout.node_dim[k]);
    psi.segment(layout.node_offset[k], layout.node_dim[k]) =
        seg + mu.mu[k] * (obs[k].u.transpose() * (obs[k].d - obs[k].u * seg));
  }
  return psi;
}

}  // namespace

NetworkState general_step(const NetworkState& state, const CombinationPolicy& policy,
                          const Topology& t, const InterestLayout& layout,
                          const std::vector<Observation>& obs, const StepSizes& mu,
                          AdaptiveCombinerState* adapt) {
  const Vector phi = combine(policy.cw, policy.cs, state.q, layout);
  const Vector psi = adapt_all(phi, layout, obs, mu);
  if (adapt != nullptr)
    return {combine_adaptive(*adapt, t, psi, phi, layout)};
  return {combine(policy.aw, policy.as, psi, layout)};
}

NetworkState atc_step(const NetworkState& state, const CombinationPolicy& policy,
                      const Topology& t, const InterestLayout& layout,
                      const std::vector<Observation>& obs, const StepSizes& mu,
                      AdaptiveCombinerState* adapt) {
  CombinationPolicy p = policy;
  const CombinationPolicy id = identity_policy(layout);
  p.cw = id.cw;
  p.cs = id.cs;
  return general_step({state.q}, p, t, layout, obs, mu, adapt);
}

NetworkState cta_step(const NetworkState& state, const CombinationPolicy& policy,
                      const Topology& t, const InterestLayout& layout,
                      const std::vector<Observation>& obs, const StepSizes& mu) {
  CombinationPolicy p = policy;
  const CombinationPolicy id = identity_policy(layout);
  p.aw = id.aw;
  p.as = id.as;
  return general_step({state.q}, p, t, layout, obs, mu);
}

NetworkState noncoop_step(const NetworkState& state, const InterestLayout& layout,
                          const std::vector<Observation>& obs, const StepSizes& mu) {
  return {adapt_all(state.q, layout, obs, mu)};
}

void incremental_step(IncrementalState& state, int k, const InterestLayout& layout,
                      const Observation& obs, const StepSizes& mu) {
  const int mg = layout.global_size;
  // Gather the blocks node k observes, in its node block order.
  Vector wk(layout.node_dim[k]);
  wk.segment(0, mg) = state.wbar.segment(0, mg);
  int off = mg;
  for (int j : layout.memberships[k]) {
    wk.segment(off, layout.common_size[j]) =
        state.wbar.segment(layout.aug_common_offset(j), layout.common_size[j]);
    off += layout.common_size[j];
  }
  wk.segment(off, layout.local_size[k]) =
      state.wbar.segment(layout.aug_local_offset(k), layout.local_size[k]);

  const Vector err = obs.d - obs.u * wk;
  const Vector grad = obs.u.transpose() * err;
  state.wbar.segment(0, mg) += mu.mu[k] / layout.num_nodes * grad.segment(0, mg);
  off = mg;
  for (int j : layout.memberships[k]) {
    const double cj = static_cast<double>(layout.cluster_members[j].size());
    state.wbar.segment(layout.aug_common_offset(j), layout.common_size[j]) +=
        mu.mu[k] / cj * grad.segment(off, layout.common_size[j]);
    off += layout.common_size[j];
  }
  state.wbar.segment(layout.aug_local_offset(k), layout.local_size[k]) +=
      mu.mu[k] * grad.segment(off, layout.local_size[k]);
}

void incremental_cycle(IncrementalState& state, const InterestLayout& layout,
                       const std::vector<Observation>& obs, const StepSizes& mu) {
  for (int k = 0; k < layout.num_nodes; ++k) incremental_step(state, k, layout, obs[k], mu);
}

Vector incremental_stacked(const IncrementalState& state, const InterestLayout& layout) {
  Vector out(layout.total_dim);
  for (int k = 0; k < layout.num_nodes; ++k) {
    out.segment(layout.global_offset(k), layout.global_size) =
        state.wbar.segment(0, layout.global_size);
    for (int j : layout.memberships[k])
      out.segment(layout.common_offset(k, j), layout.common_size[j]) =
          state.wbar.segment(layout.aug_common_offset(j), layout.common_size[j]);
    out.segment(layout.local_offset(k), layout.local_size[k]) =
        state.wbar.segment(layout.aug_local_offset(k), layout.local_size[k]);
  }
  return out;
}

Matrix augmented_selection(int k, const InterestLayout& layout) {
  Matrix t = Matrix::Zero(layout.augmented_dim, layout.node_dim[k]);
  int col = 0;
  for (int c = 0; c < layout.global_size; ++c, ++col) t(c, col) = 1.0;
  for (int j : layout.memberships[k])
    for (int c = 0; c < layout.common_size[j]; ++c, ++col)
      t(layout.aug_common_offset(j) + c, col) = 1.0;
  for (int c = 0; c < layout.local_size[k]; ++c, ++col)
    t(layout.aug_local_offset(k) + c, col) = 1.0;
  return t;
}

Matrix augmented_moment(int k, const InterestLayout& layout, const RegressorStats& stats) {
  const Matrix t = augmented_selection(k, layout);
  return t * (stats.omega[k].trace() * stats.psi[k]) * t.transpose();
}

CentralizedResult centralized_solve(const Matrix& moment_sum, const Vector& cross_sum) {
  CentralizedResult res;
  Eigen::FullPivLU<Matrix> lu(moment_sum);
  res.rank = lu.rank();
  if (!lu.isInvertible()) {
    res.singular = true;
    res.wbar = Vector::Zero(moment_sum.rows());
    return res;
  }
  res.wbar = lu.solve(cross_sum);
  return res;
}

}  // namespace dnspe
