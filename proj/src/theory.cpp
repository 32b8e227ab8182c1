#include "dnspe/theory.hpp"

#include <Eigen/LU>
#include <stdexcept>

namespace dnspe {

MomentSet build_moments(const InterestLayout& layout, const RegressorStats& stats,
                        const StepSizes& mu) {
  MomentSet m;
  std::vector<Matrix> ru_blocks, v_blocks;
  for (int k = 0; k < layout.num_nodes; ++k) {
    ru_blocks.push_back(stats.omega[k].trace() * stats.psi[k]);
    v_blocks.push_back((stats.rv[k] * stats.omega[k]).trace() * stats.psi[k]);
  }
  m.r_u = block_diag(ru_blocks);
  m.v = block_diag(v_blocks);
  m.step = Matrix::Zero(layout.total_dim, layout.total_dim);
  for (int k = 0; k < layout.num_nodes; ++k)
    m.step.diagonal().segment(layout.node_offset[k], layout.node_dim[k]).array() = mu.mu[k];
  return m;
}

Matrix mean_matrix(const Matrix& c_ext, const Matrix& a_ext, const MomentSet& moments) {
  const Eigen::Index n = moments.r_u.rows();
  return a_ext * (Matrix::Identity(n, n) - moments.step * moments.r_u) * c_ext;
}

double stability_bound(const InterestLayout& layout, const RegressorStats& stats, int k) {
  const Matrix r_uk = stats.omega[k].trace() * stats.psi[k];
  double lambda_max = 0.0;
  int off = 0;
  for (int s : layout.node_blocks(k)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(r_uk.block(off, off, s, s));
    lambda_max = std::max(lambda_max, es.eigenvalues().maxCoeff());
    off += s;
  }
  if (lambda_max <= 0.0)
    throw std::invalid_argument("stability_bound: zero moment matrix at node " +
                                std::to_string(k + 1));
  return 2.0 / lambda_max;
}

Matrix fourth_moment_same(const Matrix& psi, const Matrix& omega) {
  const int m = static_cast<int>(psi.rows());
  const double tr = omega.trace();
  const double tr2 = (omega * omega).trace();
  const Matrix pp = kron(psi, psi);
  const Vector vp = vec(psi);
  return tr * tr * pp + tr2 * vp * vp.transpose() + tr2 * commutation_matrix(m, m) * pp;
}

Matrix fourth_moment_cross(const Matrix& psi_k, const Matrix& omega_k,
                           const Matrix& psi_l, const Matrix& omega_l) {
  return kron(omega_l.trace() * psi_l, omega_k.trace() * psi_k);
}

Matrix build_S(const InterestLayout& layout, const RegressorStats& stats, int dim_cap) {
  if (layout.total_dim > dim_cap)
    throw std::runtime_error("build_S: total dimension " + std::to_string(layout.total_dim) +
                             " exceeds the cap " + std::to_string(dim_cap) +
                             " (override to proceed)");
  std::vector<Matrix> outer;
  for (int k = 0; k < layout.num_nodes; ++k) {
    std::vector<Matrix> inner;
    for (int l = 0; l < layout.num_nodes; ++l)
      inner.push_back(l == k
                          ? fourth_moment_same(stats.psi[k], stats.omega[k])
                          : fourth_moment_cross(stats.psi[k], stats.omega[k],
                                                stats.psi[l], stats.omega[l]));
    const Matrix kf = commutation_matrix(layout.node_dim[k], layout.total_dim);
    const Matrix kb = commutation_matrix(layout.total_dim, layout.node_dim[k]);
    outer.push_back(kf * block_diag(inner) * kb);
  }
  return block_diag(outer);
}

Matrix build_G(const MomentSet& moments, const Matrix* s) {
  const Eigen::Index n = moments.r_u.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix rum = moments.r_u * moments.step;
  Matrix g = kron(id, id) - kron(rum, id) - kron(id, rum);
  if (s != nullptr) g += *s * kron(moments.step, moments.step);
  return g;
}

Matrix build_F(const Matrix& c_ext, const Matrix& a_ext, const Matrix& g, int dim_cap) {
  if (c_ext.rows() > dim_cap)
    throw std::runtime_error("build_F: dimension exceeds the cap");
  const Matrix ct = c_ext.transpose();
  const Matrix at = a_ext.transpose();
  return kron(ct, ct) * g * kron(at, at);
}

namespace {

// Per-mode effective policy: CTA zeroes the A side, ATC the C side.
CombinationPolicy effective_policy(const CombinationPolicy& policy,
                                   const InterestLayout& layout) {
  CombinationPolicy p = policy;
  const CombinationPolicy id = identity_policy(layout);
  if (policy.mode == DiffusionMode::kCta) {
    p.aw = id.aw;
    p.as = id.as;
  } else if (policy.mode == DiffusionMode::kAtc) {
    p.cw = id.cw;
    p.cs = id.cs;
  }
  return p;
}

// vec of the matrix that is I on rows/cols [off, off+len) and zero elsewhere.
Vector segment_selection(int total, int off, int len) {
  Matrix sel = Matrix::Zero(total, total);
  sel.block(off, off, len, len) = Matrix::Identity(len, len);
  return vec(sel);
}

}  // namespace

TheoryReport steady_state(const InterestLayout& layout, const RegressorStats& stats,
                          const CombinationPolicy& policy, const StepSizes& mu,
                          bool use_fourth_order, int dim_cap) {
  const CombinationPolicy p = effective_policy(policy, layout);
  const Matrix c_ext = extend_policy_direct(PolicySide::kCombineFirst, p, layout);
  const Matrix a_ext = extend_policy_direct(PolicySide::kCombineSecond, p, layout);
  const MomentSet moments = build_moments(layout, stats, mu);

  TheoryReport report;
  report.b_mean = mean_matrix(c_ext, a_ext, moments);
  report.rho_mean = spectral_radius(report.b_mean);
  for (int k = 0; k < layout.num_nodes; ++k)
    report.mu_max.push_back(stability_bound(layout, stats, k));

  Matrix g;
  if (use_fourth_order) {
    const Matrix s = build_S(layout, stats, dim_cap);
    g = build_G(moments, &s);
  } else {
    g = build_G(moments, nullptr);
  }
  const Matrix f = build_F(c_ext, a_ext, g, dim_cap);
  report.rho_f = spectral_radius(f);
  report.mean_square_stable = report.rho_f < 1.0;
  if (!report.mean_square_stable) return report;

  const int m = layout.total_dim;
  const Matrix amva =
      a_ext * moments.step * moments.v.transpose() * moments.step * a_ext.transpose();
  const Vector h = vec(amva);
  const Matrix i_minus_f = Matrix::Identity(m * m, m * m) - f;
  const Vector y = i_minus_f.transpose().partialPivLu().solve(h);

  // Per-node selections through the Khatri-Rao form: diag(e_k) as N x N 1x1
  // blocks against Y = blockdiag{I_{M_k}} partitioned by node dimensions.
  const Partition ones(layout.num_nodes, 1);
  const Partition node_dims(layout.node_dim.begin(), layout.node_dim.end());
  std::vector<Matrix> id_blocks;
  for (int k = 0; k < layout.num_nodes; ++k)
    id_blocks.push_back(Matrix::Identity(layout.node_dim[k], layout.node_dim[k]));
  const Matrix node_identity = block_diag(id_blocks);

  report.msd_net = 0.0;
  report.emse_net = 0.0;
  for (int k = 0; k < layout.num_nodes; ++k) {
    Matrix ek = Matrix::Zero(layout.num_nodes, layout.num_nodes);
    ek(k, k) = 1.0;
    const Matrix sel_k = khatri_rao(ek, node_identity, ones, ones, node_dims, node_dims);
    report.msd.push_back(y.dot(vec(sel_k)));
    const Matrix sel_emse = khatri_rao(ek, moments.r_u, ones, ones, node_dims, node_dims);
    report.emse.push_back(y.dot(vec(sel_emse)));
    report.msd_net += report.msd.back() / layout.num_nodes;
    report.emse_net += report.emse.back() / layout.num_nodes;

    std::vector<double> blocks;
    int off = layout.node_offset[k];
    for (int s : layout.node_blocks(k)) {
      blocks.push_back(y.dot(segment_selection(m, off, s)));
      off += s;
    }
    report.msd_block.push_back(std::move(blocks));
  }
  return report;
}

}  // namespace dnspe
