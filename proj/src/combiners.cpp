#include "dnspe/combiners.hpp"

#include <cmath>
#include <stdexcept>

namespace dnspe {

CombinationPolicy uniform_policy(const Topology& t, const InterestLayout& layout) {
  const int n = layout.num_nodes;
  CombinationPolicy p;
  p.cw = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int l : t.neighbors[k]) p.cw(k, l) = 1.0 / t.degree(k);
  for (int j = 0; j < layout.num_clusters(); ++j) {
    const auto& members = layout.cluster_members[j];
    const int cj = static_cast<int>(members.size());
    Matrix w = Matrix::Zero(cj, cj);
    for (int rk = 0; rk < cj; ++rk) {
      const int k = members[rk];
      std::vector<int> allowed;
      for (int rl = 0; rl < cj; ++rl)
        if (t.connected(k, members[rl])) allowed.push_back(rl);
      if (allowed.empty())
        throw std::invalid_argument("uniform_policy: node " + std::to_string(k + 1) +
                                    " has empty N_k intersect C_" + std::to_string(j + 1));
      for (int rl : allowed) w(rk, rl) = 1.0 / static_cast<double>(allowed.size());
    }
    p.cs.push_back(w);
  }
  p.aw = p.cw;
  p.as = p.cs;
  return p;
}

CombinationPolicy identity_policy(const InterestLayout& layout) {
  CombinationPolicy p;
  p.cw = Matrix::Identity(layout.num_nodes, layout.num_nodes);
  p.aw = p.cw;
  for (int j = 0; j < layout.num_clusters(); ++j) {
    const int cj = static_cast<int>(layout.cluster_members[j].size());
    p.cs.push_back(Matrix::Identity(cj, cj));
    p.as.push_back(p.cs.back());
  }
  return p;
}

namespace {

void check_side(const Matrix& w, const std::vector<Matrix>& ws, const char* name,
                const Topology& t, const InterestLayout& layout,
                PolicyDiagnostics& diag) {
  const int n = layout.num_nodes;
  constexpr double kTol = 1e-12;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l)
      if (w(k, l) != 0.0 && !t.connected(k, l))
        diag.violations.push_back({std::string(name) + "^w[" + std::to_string(k + 1) + "," +
                                   std::to_string(l + 1) + "] nonzero off neighborhood"});
    const double residual = w.row(k).sum() - 1.0;
    if (std::abs(residual) > kTol)
      diag.violations.push_back({std::string(name) + "^w row " + std::to_string(k + 1) +
                                 " sums to 1 + " + std::to_string(residual)});
  }
  for (int j = 0; j < layout.num_clusters(); ++j) {
    const auto& members = layout.cluster_members[j];
    const int cj = static_cast<int>(members.size());
    for (int rk = 0; rk < cj; ++rk) {
      for (int rl = 0; rl < cj; ++rl)
        if (ws[j](rk, rl) != 0.0 && !t.connected(members[rk], members[rl]))
          diag.violations.push_back({std::string(name) + "^s_" + std::to_string(j + 1) +
                                     " weight (" + std::to_string(members[rk] + 1) + "," +
                                     std::to_string(members[rl] + 1) +
                                     ") nonzero off N_k intersect C_j"});
      const double residual = ws[j].row(rk).sum() - 1.0;
      if (std::abs(residual) > kTol)
        diag.violations.push_back({std::string(name) + "^s_" + std::to_string(j + 1) +
                                   " row for node " + std::to_string(members[rk] + 1) +
                                   " sums to 1 + " + std::to_string(residual)});
    }
  }
}

}  // namespace

PolicyDiagnostics validate_policy(const CombinationPolicy& p, const Topology& t,
                                  const InterestLayout& layout) {
  PolicyDiagnostics diag;
  check_side(p.cw, p.cs, "C", t, layout, diag);
  check_side(p.aw, p.as, "A", t, layout, diag);
  return diag;
}

Matrix build_permutation(const InterestLayout& layout) {
  const int m = layout.total_dim;
  Matrix perm = Matrix::Zero(m, m);
  for (int k = 0; k < layout.num_nodes; ++k) {
    int row = layout.node_offset[k];
    for (int c = 0; c < layout.global_size; ++c, ++row)
      perm(row, layout.grouped_global_offset(k) + c) = 1.0;
    for (int j : layout.memberships[k])
      for (int c = 0; c < layout.common_size[j]; ++c, ++row)
        perm(row, layout.grouped_common_offset(k, j) + c) = 1.0;
    for (int c = 0; c < layout.local_size[k]; ++c, ++row)
      perm(row, layout.grouped_local_offset(k) + c) = 1.0;
  }
  return perm;
}

Matrix extend_policy_direct(PolicySide side, const CombinationPolicy& p,
                            const InterestLayout& layout) {
  const Matrix& w = side == PolicySide::kCombineFirst ? p.cw : p.aw;
  const auto& ws = side == PolicySide::kCombineFirst ? p.cs : p.as;
  const int m = layout.total_dim;
  Matrix ext = Matrix::Zero(m, m);
  for (int k = 0; k < layout.num_nodes; ++k) {
    const int mg = layout.global_size;
    for (int l = 0; l < layout.num_nodes; ++l)
      if (w(k, l) != 0.0)
        ext.block(layout.global_offset(k), layout.global_offset(l), mg, mg) =
            w(k, l) * Matrix::Identity(mg, mg);
    for (int j : layout.memberships[k]) {
      const int mc = layout.common_size[j];
      const int rk = layout.cluster_rank(j, k);
      for (int l : layout.cluster_members[j]) {
        const double wjl = ws[j](rk, layout.cluster_rank(j, l));
        if (wjl != 0.0)
          ext.block(layout.common_offset(k, j), layout.common_offset(l, j), mc, mc) =
              wjl * Matrix::Identity(mc, mc);
      }
    }
    const int ml = layout.local_size[k];
    ext.block(layout.local_offset(k), layout.local_offset(k), ml, ml) =
        Matrix::Identity(ml, ml);
  }
  return ext;
}

Matrix extend_policy_permuted(PolicySide side, const CombinationPolicy& p,
                              const InterestLayout& layout, const Matrix& perm) {
  const Matrix& w = side == PolicySide::kCombineFirst ? p.cw : p.aw;
  const auto& ws = side == PolicySide::kCombineFirst ? p.cs : p.as;
  std::vector<Matrix> blocks;
  blocks.push_back(kron(w, Matrix::Identity(layout.global_size, layout.global_size)));
  for (int j = 0; j < layout.num_clusters(); ++j)
    blocks.push_back(
        kron(ws[j], Matrix::Identity(layout.common_size[j], layout.common_size[j])));
  int local_total = 0;
  for (int s : layout.local_size) local_total += s;
  blocks.push_back(Matrix::Identity(local_total, local_total));
  return perm * block_diag(blocks) * perm.transpose();
}

AdaptiveCombinerState AdaptiveCombinerState::init(const InterestLayout& layout, double nu) {
  AdaptiveCombinerState state;
  state.nu = nu;
  state.gamma2_global = Matrix::Ones(layout.num_nodes, layout.num_nodes);
  for (int j = 0; j < layout.num_clusters(); ++j) {
    const int cj = static_cast<int>(layout.cluster_members[j].size());
    state.gamma2_common.push_back(Matrix::Ones(cj, cj));
  }
  return state;
}

std::vector<double> adaptive_update(double nu, double floor,
                                    Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> gamma2_row,
                                    const std::vector<int>& neighbors,
                                    const std::vector<double>& distances2) {
  double total = 0.0;
  std::vector<double> inv(neighbors.size());
  for (size_t i = 0; i < neighbors.size(); ++i) {
    const int l = neighbors[i];
    gamma2_row[l] = (1.0 - nu) * gamma2_row[l] + nu * distances2[i];
    inv[i] = 1.0 / std::max(gamma2_row[l], floor);
    total += inv[i];
  }
  for (double& v : inv) v /= total;
  return inv;
}

}  // namespace dnspe
