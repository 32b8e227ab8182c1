#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dnspe/algorithms.hpp"
#include "dnspe/theory.hpp"

// Experiment orchestration: seeded Monte Carlo loops over algorithms with
// paired observation streams, empirical MSD/EMSE estimation, theory
// comparison and result emission (CSV + JSON summary + SVG learning curves).

namespace dnspe {

enum class AlgorithmKind { kCta, kAtc, kGeneral, kNonCooperative, kIncremental };

std::string algorithm_kind_name(AlgorithmKind kind);

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::kAtc;
  std::string label;              // defaults to the kind name
  bool adaptive_weights = false;  // adaptive A-side combiners
  bool clique = false;            // run on the complete graph instead

  std::string name() const { return label.empty() ? algorithm_kind_name(kind) : label; }
};

struct ExperimentConfig {
  std::string name = "experiment";

  // Generic scenario (ignored when `cr` is set).
  InterestLayout layout;
  Topology topology;
  double noise_var = 1e-3;
  double snr_lo_db = 10.0, snr_hi_db = 20.0;
  double ar_alpha_max = 1.0;

  // Cognitive-radio scenario.
  bool cr = false;
  int cr_num_pu = 2, cr_num_basis = 16, cr_num_freqs = 80;
  double cr_basis_std = 0.05, cr_tap_var = 0.25;
  double cr_z_std_lo = 0.04, cr_z_std_hi = 0.16;
  double cr_atten_std_lo = 0.3, cr_atten_std_hi = 1.25;

  std::vector<AlgorithmSpec> algorithms;
  double mu = 0.01;
  int runs = 50;
  int iterations = 5000;
  double window = 0.05;            // trailing steady-state fraction
  std::uint64_t seed = 1;
  int workers = 0;                 // 0: hardware concurrency
  bool with_theory = true;
  bool use_fourth_order = true;
  int dim_cap = kDefaultDimCap;
  bool track_emse = true;
  double adaptive_nu = 0.1;
  double divergence_threshold = 1e9;
  std::string out_dir = "out";

  void validate() const;  // throws std::invalid_argument
};

// Squared-error breakdown of one stacked state against the truth. The
// common-block network value for cluster j averages only over the members
// of C_j; nodes outside the cluster do not estimate that block.
struct ErrorBreakdown {
  std::vector<double> node;            // ||qtilde_k||^2
  std::vector<double> global_block;    // per node
  std::vector<std::vector<double>> common_block;  // per cluster, per member
  std::vector<double> local_block;     // per node
  double net = 0.0;
  double net_global = 0.0;
  std::vector<double> net_common;      // per cluster
  double net_local = 0.0;
};

ErrorBreakdown empirical_msd(const Vector& state, const GroundTruth& truth,
                             const InterestLayout& layout);

// ||U qtilde_k||^2 with U drawn independently of the adaptation stream.
double empirical_emse(const Vector& state, const GroundTruth& truth,
                      const InterestLayout& layout, int k, const Matrix& fresh_u);

// Per-algorithm learning curves (means and standard errors over runs) plus
// steady-state scalars read off the trailing window.
struct MetricsSeries {
  std::string algo;
  int iterations = 0;
  // Column layout: net, node 0..N-1, global:net, common:j:net per cluster,
  // local:net, then (when tracked) emse:net, emse:node 0..N-1.
  std::vector<std::string> columns;
  std::vector<std::vector<double>> mean;    // [column][t]
  std::vector<std::vector<double>> stderr_; // [column][t]
  // Steady-state scalars (per-run trailing means, averaged over runs).
  std::vector<double> msd_ss, msd_ss_se;    // per node
  std::vector<double> emse_ss, emse_ss_se;  // per node
  double msd_net_ss = 0.0, msd_net_ss_se = 0.0;
  double emse_net_ss = 0.0, emse_net_ss_se = 0.0;
  bool diverged = false;
  int first_diverged_run = -1;
};

struct ExperimentResult {
  ExperimentConfig config;
  InterestLayout layout;  // the effective layout (CR scenarios derive theirs)
  GroundTruth truth;
  RegressorStats stats;   // generic scenario only
  std::optional<CrScenario> cr;
  std::vector<MetricsSeries> series;                  // one per algorithm
  std::vector<CombinationPolicy> policies;            // parallel to series
  std::vector<std::optional<TheoryReport>> theory;    // parallel to series
  bool any_diverged = false;
};

// Runs every algorithm on identical observation streams, run-parallel with a
// deterministic run-ordered merge, and computes the theory report once from
// the population moments. Truth and statistics are drawn once from the
// experiment seed; run r uses an independent stream derived from (seed, r).
ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes series.csv, summary.json, policy dump and one SVG per metric family
// into `dir`. Returns the list of paths written.
std::vector<std::string> emit_results(const ExperimentResult& result,
                                      const std::string& dir);

double to_db(double x);

}  // namespace dnspe
