#include "dnspe/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <numbers>
#include <stdexcept>

namespace dnspe {

bool InterestLayout::in_cluster(int j, int k) const {
  const auto& c = cluster_members[j];
  return std::binary_search(c.begin(), c.end(), k);
}

int InterestLayout::cluster_rank(int j, int k) const {
  const auto& c = cluster_members[j];
  auto it = std::lower_bound(c.begin(), c.end(), k);
  if (it == c.end() || *it != k) return -1;
  return static_cast<int>(it - c.begin());
}

int InterestLayout::common_offset(int k, int j) const {
  int off = node_offset[k] + global_size;
  for (int jj : memberships[k]) {
    if (jj == j) return off;
    off += common_size[jj];
  }
  throw std::invalid_argument("common_offset: node not in cluster");
}

int InterestLayout::local_offset(int k) const {
  int off = node_offset[k] + global_size;
  for (int jj : memberships[k]) off += common_size[jj];
  return off;
}

int InterestLayout::grouped_global_offset(int k) const {
  return k * global_size;
}

int InterestLayout::grouped_common_offset(int k, int j) const {
  int off = num_nodes * global_size;
  for (int jj = 0; jj < j; ++jj)
    off += static_cast<int>(cluster_members[jj].size()) * common_size[jj];
  const int rank = cluster_rank(j, k);
  if (rank < 0) throw std::invalid_argument("grouped_common_offset: node not in cluster");
  return off + rank * common_size[j];
}

int InterestLayout::grouped_local_offset(int k) const {
  int off = num_nodes * global_size;
  for (int j = 0; j < num_clusters(); ++j)
    off += static_cast<int>(cluster_members[j].size()) * common_size[j];
  for (int l = 0; l < k; ++l) off += local_size[l];
  return off;
}

int InterestLayout::aug_common_offset(int j) const {
  int off = global_size;
  for (int jj = 0; jj < j; ++jj) off += common_size[jj];
  return off;
}

int InterestLayout::aug_local_offset(int k) const {
  int off = global_size;
  for (int s : common_size) off += s;
  for (int l = 0; l < k; ++l) off += local_size[l];
  return off;
}

std::vector<int> InterestLayout::node_blocks(int k) const {
  std::vector<int> blocks;
  if (global_size > 0) blocks.push_back(global_size);
  for (int j : memberships[k]) blocks.push_back(common_size[j]);
  if (local_size[k] > 0) blocks.push_back(local_size[k]);
  return blocks;
}

BlockLayout InterestLayout::block_layout() const {
  BlockLayout out;
  for (int k = 0; k < num_nodes; ++k)
    for (int s : node_blocks(k)) out.sizes.push_back(s);
  return out;
}

InterestLayout build_layout(int num_nodes, int global_size,
                            const std::vector<std::pair<std::vector<int>, int>>& clusters,
                            std::vector<int> local_size, std::vector<int> obs_size) {
  if (num_nodes < 1) throw std::invalid_argument("build_layout: need at least one node");
  InterestLayout layout;
  layout.num_nodes = num_nodes;
  layout.global_size = global_size;
  for (const auto& [members, size] : clusters) {
    if (members.empty()) throw std::invalid_argument("build_layout: empty cluster");
    std::vector<int> sorted = members;
    std::sort(sorted.begin(), sorted.end());
    for (int k : sorted)
      if (k < 0 || k >= num_nodes)
        throw std::invalid_argument("build_layout: cluster member out of range");
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("build_layout: duplicate cluster member");
    layout.cluster_members.push_back(std::move(sorted));
    layout.common_size.push_back(size);
  }
  layout.local_size = std::move(local_size);
  layout.obs_size = std::move(obs_size);
  if (static_cast<int>(layout.local_size.size()) != num_nodes ||
      static_cast<int>(layout.obs_size.size()) != num_nodes)
    throw std::invalid_argument("build_layout: per-node size lists must have N entries");

  layout.memberships.assign(num_nodes, {});
  for (int j = 0; j < layout.num_clusters(); ++j)
    for (int k : layout.cluster_members[j]) layout.memberships[k].push_back(j);

  layout.node_dim.resize(num_nodes);
  layout.node_offset.resize(num_nodes);
  int off = 0;
  for (int k = 0; k < num_nodes; ++k) {
    int mk = global_size + layout.local_size[k];
    for (int j : layout.memberships[k]) mk += layout.common_size[j];
    layout.node_dim[k] = mk;
    layout.node_offset[k] = off;
    off += mk;
  }
  layout.total_dim = off;
  layout.augmented_dim = global_size;
  for (int s : layout.common_size) layout.augmented_dim += s;
  for (int s : layout.local_size) layout.augmented_dim += s;
  return layout;
}

bool Topology::connected(int k, int l) const {
  return std::binary_search(neighbors[k].begin(), neighbors[k].end(), l);
}

Topology topology_from_edges(int num_nodes, const std::vector<std::pair<int, int>>& edges) {
  Topology t;
  t.neighbors.assign(num_nodes, {});
  for (int k = 0; k < num_nodes; ++k) t.neighbors[k].push_back(k);
  for (auto [a, b] : edges) {
    if (a < 0 || a >= num_nodes || b < 0 || b >= num_nodes)
      throw std::invalid_argument("topology_from_edges: node id out of range");
    t.neighbors[a].push_back(b);
    t.neighbors[b].push_back(a);
  }
  for (auto& nb : t.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return t;
}

Topology complete_topology(int num_nodes) {
  Topology t;
  t.neighbors.assign(num_nodes, {});
  for (int k = 0; k < num_nodes; ++k)
    for (int l = 0; l < num_nodes; ++l) t.neighbors[k].push_back(l);
  return t;
}

namespace {

// BFS reachability restricted to `allowed` nodes.
bool subgraph_connected(const Topology& t, const std::vector<int>& allowed) {
  if (allowed.empty()) return true;
  std::vector<bool> in(t.neighbors.size(), false), seen(t.neighbors.size(), false);
  for (int k : allowed) in[k] = true;
  std::deque<int> queue{allowed.front()};
  seen[allowed.front()] = true;
  int count = 0;
  while (!queue.empty()) {
    int k = queue.front();
    queue.pop_front();
    ++count;
    for (int l : t.neighbors[k])
      if (in[l] && !seen[l]) {
        seen[l] = true;
        queue.push_back(l);
      }
  }
  return count == static_cast<int>(allowed.size());
}

}  // namespace

bool TopologyDiagnostics::ok() const {
  if (!self_loops_ok || !symmetric || !network_connected) return false;
  return std::all_of(cluster_connected.begin(), cluster_connected.end(),
                     [](bool b) { return b; });
}

TopologyDiagnostics validate_topology(const Topology& t, const InterestLayout& layout) {
  TopologyDiagnostics diag;
  diag.self_loops_ok = true;
  diag.symmetric = true;
  const int n = layout.num_nodes;
  for (int k = 0; k < n; ++k) {
    if (!t.connected(k, k)) {
      diag.self_loops_ok = false;
      diag.messages.push_back("node " + std::to_string(k + 1) + " missing self-loop");
    }
    for (int l : t.neighbors[k])
      if (!t.connected(l, k)) {
        diag.symmetric = false;
        diag.messages.push_back("asymmetric link " + std::to_string(k + 1) + "->" +
                                std::to_string(l + 1));
      }
  }
  std::vector<int> all(n);
  for (int k = 0; k < n; ++k) all[k] = k;
  diag.network_connected = subgraph_connected(t, all);
  if (!diag.network_connected) diag.messages.push_back("network graph disconnected");
  for (int j = 0; j < layout.num_clusters(); ++j) {
    bool c = subgraph_connected(t, layout.cluster_members[j]);
    diag.cluster_connected.push_back(c);
    if (!c)
      diag.messages.push_back("cluster " + std::to_string(j + 1) +
                              " induces a disconnected subgraph");
  }
  return diag;
}

Vector GroundTruth::node_vector(int k, const InterestLayout& layout) const {
  Vector w(layout.node_dim[k]);
  int off = 0;
  w.segment(off, layout.global_size) = w_global;
  off += layout.global_size;
  for (int j : layout.memberships[k]) {
    w.segment(off, layout.common_size[j]) = sigma_common[j];
    off += layout.common_size[j];
  }
  w.segment(off, layout.local_size[k]) = xi_local[k];
  return w;
}

Vector GroundTruth::stacked(const InterestLayout& layout) const {
  Vector out(layout.total_dim);
  for (int k = 0; k < layout.num_nodes; ++k)
    out.segment(layout.node_offset[k], layout.node_dim[k]) = node_vector(k, layout);
  return out;
}

Vector GroundTruth::augmented(const InterestLayout& layout) const {
  Vector out(layout.augmented_dim);
  out.segment(0, layout.global_size) = w_global;
  for (int j = 0; j < layout.num_clusters(); ++j)
    out.segment(layout.aug_common_offset(j), layout.common_size[j]) = sigma_common[j];
  for (int k = 0; k < layout.num_nodes; ++k)
    out.segment(layout.aug_local_offset(k), layout.local_size[k]) = xi_local[k];
  return out;
}

GroundTruth random_truth(const InterestLayout& layout, Rng& rng) {
  GroundTruth truth;
  truth.w_global = rng.gaussian_vector(layout.global_size);
  for (int s : layout.common_size) truth.sigma_common.push_back(rng.gaussian_vector(s));
  for (int s : layout.local_size) truth.xi_local.push_back(rng.gaussian_vector(s));
  return truth;
}

Matrix ar1_covariance(int dim, double sigma_u2, double alpha) {
  Matrix psi(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) psi(a, b) = sigma_u2 * std::pow(alpha, std::abs(a - b));
  return psi;
}

RegressorStats make_ar_stats(const InterestLayout& layout, const GroundTruth& truth,
                             double noise_var, double snr_lo_db, double snr_hi_db,
                             double alpha_max, Rng& rng) {
  RegressorStats stats;
  for (int k = 0; k < layout.num_nodes; ++k) {
    const int mk = layout.node_dim[k];
    const int lk = layout.obs_size[k];
    const Vector wk = truth.node_vector(k, layout);
    const double noise_power = noise_var * lk;
    const double alpha = alpha_max * rng.uniform();
    const double snr_db = snr_lo_db + (snr_hi_db - snr_lo_db) * rng.uniform();
    // E||U w||^2 = Tr(Omega) w' Psi w with Omega = I; scale the unit-variance
    // AR(1) covariance so the node lands exactly on the drawn SNR.
    const Matrix psi1 = ar1_covariance(mk, 1.0, alpha);
    const double unit_power = lk * wk.dot(psi1 * wk);
    if (unit_power <= 0.0)
      throw std::runtime_error("make_ar_stats: degenerate truth at node " +
                               std::to_string(k + 1));
    const double sigma_u2 = std::pow(10.0, snr_db / 10.0) * noise_power / unit_power;
    stats.psi.push_back(sigma_u2 * psi1);
    stats.omega.push_back(Matrix::Identity(lk, lk));
    stats.rv.push_back(noise_var * Matrix::Identity(lk, lk));
  }
  return stats;
}

namespace {

// Symmetric PSD square root via eigendecomposition; small negative
// eigenvalues from round-off are clamped at zero.
Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, es.eigenvalues().maxCoeff()))
    throw std::invalid_argument("psd_sqrt: matrix is not positive semi-definite");
  Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Matrix gen_regressor(int k, const RegressorStats& stats, Rng& rng) {
  const Matrix& psi = stats.psi[k];
  const Matrix& omega = stats.omega[k];
  // U = Omega^{1/2} Z Psi^{1/2} gives vec(U) ~ N(0, Psi (x) Omega).
  Matrix z = rng.gaussian_matrix(static_cast<int>(omega.rows()), static_cast<int>(psi.rows()));
  return psd_sqrt(omega) * z * psd_sqrt(psi);
}

Observation gen_observation(int k, const GroundTruth& truth, const InterestLayout& layout,
                            const RegressorStats& stats, Rng& rng) {
  Observation obs;
  obs.u = gen_regressor(k, stats, rng);
  Vector v = psd_sqrt(stats.rv[k]) * rng.gaussian_vector(static_cast<int>(stats.rv[k].rows()));
  obs.d = obs.u * truth.node_vector(k, layout) + v;
  return obs;
}

RegressorSampler::RegressorSampler(const RegressorStats& stats) {
  for (size_t k = 0; k < stats.psi.size(); ++k) {
    omega_sqrt_.push_back(psd_sqrt(stats.omega[k]));
    psi_sqrt_.push_back(psd_sqrt(stats.psi[k]));
    rv_sqrt_.push_back(psd_sqrt(stats.rv[k]));
  }
}

Matrix RegressorSampler::draw_u(int k, Rng& rng) const {
  Matrix z = rng.gaussian_matrix(static_cast<int>(omega_sqrt_[k].rows()),
                                 static_cast<int>(psi_sqrt_[k].rows()));
  return omega_sqrt_[k] * z * psi_sqrt_[k];
}

Observation RegressorSampler::draw(int k, const GroundTruth& truth,
                                   const InterestLayout& layout, Rng& rng) const {
  Observation obs;
  obs.u = draw_u(k, rng);
  Vector v = rv_sqrt_[k] * rng.gaussian_vector(static_cast<int>(rv_sqrt_[k].rows()));
  obs.d = obs.u * truth.node_vector(k, layout) + v;
  return obs;
}

// ---------------------------------------------------------------------------
// Cognitive-radio scenario

Vector cr_basis(double f, int num_basis, double basis_std,
                const std::vector<double>& centers) {
  Vector b(num_basis);
  for (int x = 0; x < num_basis; ++x) {
    const double d = f - centers[x];
    b[x] = std::exp(-d * d / (2.0 * basis_std * basis_std));
  }
  return b;
}

CrScenario make_cr_scenario(int num_nodes, int num_pu, int num_basis, int num_freqs,
                            const std::vector<std::vector<int>>& clusters,
                            double basis_std, double channel_tap_var,
                            double z_std_lo, double z_std_hi,
                            double atten_std_lo, double atten_std_hi, Rng& rng) {
  CrScenario scen;
  scen.num_pu = num_pu;
  scen.num_basis = num_basis;
  scen.basis_std = basis_std;

  std::vector<std::pair<std::vector<int>, int>> cluster_spec;
  for (const auto& members : clusters) cluster_spec.emplace_back(members, num_basis);
  scen.layout = build_layout(num_nodes, num_pu * num_basis, cluster_spec,
                             std::vector<int>(num_nodes, num_basis),
                             std::vector<int>(num_nodes, num_freqs));
  for (int k = 0; k < num_nodes; ++k) {
    const int needed = scen.layout.node_dim[k];
    if (num_freqs <= needed)
      throw std::invalid_argument("make_cr_scenario: need L > (Q+|I_k|+1)X at every node");
  }

  for (int m = 0; m < num_freqs; ++m)
    scen.freqs.push_back((m + 0.5) / num_freqs);
  for (int x = 0; x < num_basis; ++x)
    scen.centers.push_back((x + 0.5) / num_basis);

  // PU spectra: two adjacent unit-weight bases per PU, non-overlapping.
  scen.truth.w_global = Vector::Zero(num_pu * num_basis);
  for (int q = 0; q < num_pu; ++q) {
    const int lead = (2 * q) % num_basis;
    scen.truth.w_global[q * num_basis + lead] = 1.0;
    scen.truth.w_global[q * num_basis + (lead + 1) % num_basis] = 1.0;
  }
  // Interferers: one active basis each, weight 0.3, spread across the band.
  const int num_clusters = static_cast<int>(clusters.size());
  for (int j = 0; j < num_clusters; ++j) {
    Vector s = Vector::Zero(num_basis);
    s[(2 * num_pu + j) % num_basis] = 0.3;
    scen.truth.sigma_common.push_back(s);
  }
  for (int k = 0; k < num_nodes; ++k) {
    Vector s = Vector::Zero(num_basis);
    s[(2 * num_pu + num_clusters + k) % num_basis] = 0.3;
    scen.truth.xi_local.push_back(s);
  }

  const int num_tx = num_pu + num_clusters + num_nodes;
  const double tap_std = std::sqrt(channel_tap_var / 2.0);
  scen.taps.assign(num_tx, std::vector<Eigen::Vector3cd>(num_nodes));
  scen.atten_noise_std.assign(num_tx, std::vector<double>(num_nodes));
  for (int t = 0; t < num_tx; ++t)
    for (int k = 0; k < num_nodes; ++k) {
      for (int tap = 0; tap < 3; ++tap)
        scen.taps[t][k][tap] = std::complex<double>(tap_std * rng.gaussian(),
                                                    tap_std * rng.gaussian());
      scen.atten_noise_std[t][k] =
          atten_std_lo + (atten_std_hi - atten_std_lo) * rng.uniform();
    }
  for (int k = 0; k < num_nodes; ++k)
    scen.z_noise_std.push_back(z_std_lo + (z_std_hi - z_std_lo) * rng.uniform());
  return scen;
}

double cr_attenuation(const CrScenario& scen, int transmitter, int receiver, double f) {
  std::complex<double> h = 0.0;
  for (int tap = 0; tap < 3; ++tap) {
    const double phase = -2.0 * std::numbers::pi * f * tap;
    h += scen.taps[transmitter][receiver][tap] *
         std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return std::norm(h);
}

Observation cr_gen_observation(int k, const CrScenario& scen, Rng& rng) {
  const InterestLayout& layout = scen.layout;
  const int num_clusters = layout.num_clusters();
  // Transmitters seen by node k, in node block order: PUs, common interferers
  // in I_k order, own local interferer.
  std::vector<int> tx;
  for (int q = 0; q < scen.num_pu; ++q) tx.push_back(q);
  for (int j : layout.memberships[k]) tx.push_back(scen.num_pu + j);
  tx.push_back(scen.num_pu + num_clusters + k);

  const int num_freqs = static_cast<int>(scen.freqs.size());
  Observation obs;
  obs.u.resize(num_freqs, layout.node_dim[k]);
  obs.d.resize(num_freqs);
  const Vector wk = scen.truth.node_vector(k, layout);
  // Rows are scaled so the snapshot energy does not grow with the grid
  // resolution; the model d = U w is invariant under the common factor.
  const double row_scale = 1.0 / std::sqrt(static_cast<double>(num_freqs));
  for (int m = 0; m < num_freqs; ++m) {
    const double f = scen.freqs[m];
    const Vector b0 = cr_basis(f, scen.num_basis, scen.basis_std, scen.centers);
    double d_true = 0.0;
    for (size_t s = 0; s < tx.size(); ++s) {
      const double p = cr_attenuation(scen, tx[s], k, f);
      // Only a noisy attenuation estimate is available; the linear model
      // d = U w holds for the regressor actually used, so the received PSD
      // is formed with the same estimate.
      const double p_hat = p + scen.atten_noise_std[tx[s]][k] * rng.gaussian();
      obs.u.row(m).segment(s * scen.num_basis, scen.num_basis) =
          row_scale * (p_hat * b0).transpose();
      d_true += p_hat * b0.dot(wk.segment(s * scen.num_basis, scen.num_basis));
    }
    obs.d[m] = row_scale * (d_true + scen.z_noise_std[k] * rng.gaussian());
  }
  return obs;
}

}  // namespace dnspe
