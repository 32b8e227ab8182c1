#pragma once

#include <string>
#include <vector>

#include "dnspe/blockmat.hpp"
#include "dnspe/rng.hpp"

// Who estimates what: cluster memberships, block sizes and all offset
// arithmetic, plus the synthetic data generators for the generic validation
// scenario and the cognitive-radio scenario.

namespace dnspe {

// Node and cluster indices are 0-based everywhere in code; scenario files use
// 1-based ids and are translated on load.
struct InterestLayout {
  int num_nodes = 0;                               // N
  int global_size = 0;                             // M_g
  std::vector<std::vector<int>> cluster_members;   // C[j], ordered node ids
  std::vector<int> common_size;                    // M_c[j]
  std::vector<int> local_size;                     // M_l[k]
  std::vector<int> obs_size;                       // L_k

  // Derived by build_layout.
  std::vector<std::vector<int>> memberships;       // I[k], ordered cluster ids
  std::vector<int> node_dim;                       // M_k
  std::vector<int> node_offset;                    // start of node k, node-wise stacking
  int total_dim = 0;                               // sum of M_k
  int augmented_dim = 0;                           // M_g + sum M_c + sum M_l

  int num_clusters() const { return static_cast<int>(cluster_members.size()); }
  bool in_cluster(int j, int k) const;
  // Position of k within C[j] (0-based member rank); -1 if absent.
  int cluster_rank(int j, int k) const;

  // Node-wise stacking offsets (into the total_dim vector).
  int global_offset(int k) const { return node_offset[k]; }
  int common_offset(int k, int j) const;   // requires j in I[k]
  int local_offset(int k) const;

  // Grouped stacking offsets (0-based): all global copies, then per-cluster
  // copies in within-cluster order, then all locals.
  int grouped_global_offset(int k) const;
  int grouped_common_offset(int k, int j) const;
  int grouped_local_offset(int k) const;

  // Augmented (centralized) ordering: w, then s_1..s_J, then xi_1..xi_N.
  int aug_common_offset(int j) const;
  int aug_local_offset(int k) const;

  // In-interest block sizes of node k in stacking order: M_g, then M_c[j]
  // for j in I[k], then M_l[k].
  std::vector<int> node_blocks(int k) const;
  // All blocks of all nodes in stacking order.
  BlockLayout block_layout() const;
};

// Throws std::invalid_argument on empty clusters or out-of-range members.
InterestLayout build_layout(int num_nodes, int global_size,
                            const std::vector<std::pair<std::vector<int>, int>>& clusters,
                            std::vector<int> local_size, std::vector<int> obs_size);

struct StepSizes {
  std::vector<double> mu;  // per node, > 0
};

struct Topology {
  // neighbors[k] is sorted and includes k itself.
  std::vector<std::vector<int>> neighbors;

  bool connected(int k, int l) const;
  int degree(int k) const { return static_cast<int>(neighbors[k].size()); }
};

Topology topology_from_edges(int num_nodes, const std::vector<std::pair<int, int>>& edges);
Topology complete_topology(int num_nodes);

struct TopologyDiagnostics {
  bool self_loops_ok = false;
  bool symmetric = false;
  bool network_connected = false;
  std::vector<bool> cluster_connected;   // per cluster j
  std::vector<std::string> messages;

  bool ok() const;
};

TopologyDiagnostics validate_topology(const Topology& t, const InterestLayout& layout);

struct GroundTruth {
  Vector w_global;                  // M_g
  std::vector<Vector> sigma_common; // per cluster, M_c[j]
  std::vector<Vector> xi_local;     // per node, M_l[k]

  // Node k's concatenated optimum in node-wise block order (length M_k).
  Vector node_vector(int k, const InterestLayout& layout) const;
  // Stacked across all nodes (length total_dim).
  Vector stacked(const InterestLayout& layout) const;
  // Augmented ordering (length augmented_dim).
  Vector augmented(const InterestLayout& layout) const;
};

GroundTruth random_truth(const InterestLayout& layout, Rng& rng);

struct RegressorStats {
  std::vector<Matrix> psi;   // M_k x M_k column covariance
  std::vector<Matrix> omega; // L_k x L_k row covariance
  std::vector<Matrix> rv;    // L_k x L_k noise covariance
};

// Toeplitz AR(1) column covariance: psi[a][b] = sigma_u^2 * alpha^|a-b|.
Matrix ar1_covariance(int dim, double sigma_u2, double alpha);

// Validation-scenario statistics: Omega = I, Rv = noise_var * I, and per-node
// AR(1) Psi. alpha is uniform in (0, alpha_max); sigma_u^2 is then solved so
// the node SNR = E||U w||^2 / E||v||^2 sits at a level drawn uniformly from
// [snr_lo_db, snr_hi_db]. alpha_max < 1 keeps the regressors well conditioned.
RegressorStats make_ar_stats(const InterestLayout& layout, const GroundTruth& truth,
                             double noise_var, double snr_lo_db, double snr_hi_db,
                             double alpha_max,
                             Rng& rng);

// One matrix-variate normal draw: vec(U) ~ N(0, Psi (x) Omega).
Matrix gen_regressor(int k, const RegressorStats& stats, Rng& rng);

struct Observation {
  Vector d;   // L_k
  Matrix u;   // L_k x M_k
};

// d = U w_k + v with v ~ N(0, Rv[k]).
Observation gen_observation(int k, const GroundTruth& truth, const InterestLayout& layout,
                            const RegressorStats& stats, Rng& rng);

// Same draws as gen_regressor / gen_observation with the covariance square
// roots factorized once. Used by the Monte Carlo loops.
class RegressorSampler {
 public:
  explicit RegressorSampler(const RegressorStats& stats);

  Matrix draw_u(int k, Rng& rng) const;
  Observation draw(int k, const GroundTruth& truth, const InterestLayout& layout,
                   Rng& rng) const;

 private:
  std::vector<Matrix> omega_sqrt_, psi_sqrt_, rv_sqrt_;
};

// ---------------------------------------------------------------------------
// Cognitive-radio scenario: Q primary users sensed by all nodes (global),
// common interferers per cluster, one local interferer per node. Spectra are
// expanded over X Gaussian basis functions; regressor rows are noisy
// attenuation estimates Kronecker the basis vector.

struct CrScenario {
  InterestLayout layout;          // M_g = Q*X, M_c[j] = X, M_l[k] = X
  int num_pu = 0;                 // Q
  int num_basis = 0;              // X
  double basis_std = 0.05;        // sigma_b
  std::vector<double> freqs;      // L sample frequencies in [0,1]
  std::vector<double> centers;    // X basis centers
  GroundTruth truth;              // PU coefficients in w_global, interferers in common/local
  // Channel taps: 3 complex taps per (transmitter, receiver). Transmitters
  // are ordered: PUs 0..Q-1, then common interferers (one per cluster), then
  // local interferers (one per node).
  std::vector<std::vector<Eigen::Vector3cd>> taps; // [transmitter][receiver]
  std::vector<std::vector<double>> atten_noise_std; // per (transmitter, receiver)
  std::vector<double> z_noise_std;                  // per receiver
  int num_transmitters() const { return static_cast<int>(taps.size()); }
};

// Gaussian basis vector at frequency f, amplitude normalized to one.
Vector cr_basis(double f, int num_basis, double basis_std, const std::vector<double>& centers);

// Builds the default CR scenario: N secondary users, Q PUs, one common
// interferer per cluster, X bases, L frequencies. Ground truth: each PU
// activates two adjacent bases with unit weight (PUs non-overlapping),
// interferers activate one basis with weight 0.3. Per-link attenuation-noise
// stds and per-node z-noise stds are drawn from the given ranges.
CrScenario make_cr_scenario(int num_nodes, int num_pu, int num_basis, int num_freqs,
                            const std::vector<std::vector<int>>& clusters,
                            double basis_std, double channel_tap_var,
                            double z_std_lo, double z_std_hi,
                            double atten_std_lo, double atten_std_hi, Rng& rng);

// True attenuation |H_tk(f)|^2 from the 3-tap channel.
double cr_attenuation(const CrScenario& scen, int transmitter, int receiver, double f);

// One CR observation: regressor rows use noisy attenuation estimates, d uses
// the true attenuations plus z noise.
Observation cr_gen_observation(int k, const CrScenario& scen, Rng& rng);

}  // namespace dnspe
