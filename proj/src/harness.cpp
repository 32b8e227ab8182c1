#include "dnspe/harness.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace dnspe {

namespace {

// splitmix64 finalizer over (seed, run, stream) so run streams are mutually
// independent and reproducible.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t run, std::uint64_t stream) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ull * (run + 1) + (stream << 56);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::string algorithm_kind_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kCta: return "cta";
    case AlgorithmKind::kAtc: return "atc";
    case AlgorithmKind::kGeneral: return "general";
    case AlgorithmKind::kNonCooperative: return "noncoop";
    case AlgorithmKind::kIncremental: return "incremental";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (runs < 1) throw std::invalid_argument("config: runs must be >= 1");
  if (iterations < 1) throw std::invalid_argument("config: iterations must be >= 1");
  if (window <= 0.0 || window > 1.0)
    throw std::invalid_argument("config: window must be in (0, 1]");
  if (mu <= 0.0) throw std::invalid_argument("config: mu must be positive");
  if (algorithms.empty()) throw std::invalid_argument("config: no algorithms listed");
}

double to_db(double x) { return 10.0 * std::log10(x); }

ErrorBreakdown empirical_msd(const Vector& state, const GroundTruth& truth,
                             const InterestLayout& layout) {
  ErrorBreakdown out;
  const int n = layout.num_nodes;
  out.common_block.assign(layout.num_clusters(), {});
  out.net_common.assign(layout.num_clusters(), 0.0);
  for (int k = 0; k < n; ++k) {
    const double g = (truth.w_global - state.segment(layout.global_offset(k),
                                                     layout.global_size))
                         .squaredNorm();
    const double l = (truth.xi_local[k] - state.segment(layout.local_offset(k),
                                                        layout.local_size[k]))
                         .squaredNorm();
    double node_total = g + l;
    out.global_block.push_back(g);
    out.local_block.push_back(l);
    for (int j : layout.memberships[k]) {
      const double c = (truth.sigma_common[j] -
                        state.segment(layout.common_offset(k, j), layout.common_size[j]))
                           .squaredNorm();
      out.common_block[j].push_back(c);
      node_total += c;
    }
    out.node.push_back(node_total);
    out.net += node_total / n;
    out.net_global += g / n;
    out.net_local += l / n;
  }
  for (int j = 0; j < layout.num_clusters(); ++j) {
    for (double c : out.common_block[j])
      out.net_common[j] += c / static_cast<double>(layout.cluster_members[j].size());
  }
  return out;
}

double empirical_emse(const Vector& state, const GroundTruth& truth,
                      const InterestLayout& layout, int k, const Matrix& fresh_u) {
  const Vector qtilde = truth.node_vector(k, layout) -
                        state.segment(layout.node_offset[k], layout.node_dim[k]);
  return (fresh_u * qtilde).squaredNorm();
}

namespace {

struct RunPartial {
  // values[column][t]
  std::vector<std::vector<std::vector<double>>> values;  // [algo][column][t]
  // trailing-window means
  std::vector<std::vector<double>> msd_ss, emse_ss;      // [algo][node]
  std::vector<double> msd_net_ss, emse_net_ss;           // [algo]
  std::vector<bool> diverged;                            // [algo]
};

std::vector<std::string> metric_columns(const InterestLayout& layout, bool emse) {
  std::vector<std::string> cols{"msd:net"};
  for (int k = 0; k < layout.num_nodes; ++k)
    cols.push_back("msd:node:" + std::to_string(k + 1));
  cols.push_back("msd:global:net");
  for (int j = 0; j < layout.num_clusters(); ++j)
    cols.push_back("msd:common:" + std::to_string(j + 1) + ":net");
  cols.push_back("msd:local:net");
  if (emse) {
    cols.push_back("emse:net");
    for (int k = 0; k < layout.num_nodes; ++k)
      cols.push_back("emse:node:" + std::to_string(k + 1));
  }
  return cols;
}

struct AlgoRuntime {
  AlgorithmSpec spec;
  Topology topology;
  CombinationPolicy policy;
};

RunPartial simulate_run(const ExperimentConfig& config, const InterestLayout& layout,
                        const GroundTruth& truth, const RegressorStats& stats,
                        const CrScenario* cr, const std::vector<AlgoRuntime>& algos,
                        int run_index) {
  const int n = layout.num_nodes;
  const int t_max = config.iterations;
  const bool emse = config.track_emse && cr == nullptr;
  const int num_cols = static_cast<int>(metric_columns(layout, emse).size());
  const int window_start =
      std::max(0, t_max - std::max(1, static_cast<int>(config.window * t_max)));
  const double thresh2 = config.divergence_threshold * config.divergence_threshold;

  Rng rng_obs(mix_seed(config.seed, run_index, 1));
  Rng rng_eval(mix_seed(config.seed, run_index, 2));
  std::optional<RegressorSampler> sampler;
  if (cr == nullptr) sampler.emplace(stats);

  const int num_algos = static_cast<int>(algos.size());
  RunPartial partial;
  partial.values.assign(num_algos,
                        std::vector<std::vector<double>>(num_cols,
                                                         std::vector<double>(t_max, 0.0)));
  partial.msd_ss.assign(num_algos, std::vector<double>(n, 0.0));
  partial.emse_ss.assign(num_algos, std::vector<double>(n, 0.0));
  partial.msd_net_ss.assign(num_algos, 0.0);
  partial.emse_net_ss.assign(num_algos, 0.0);
  partial.diverged.assign(num_algos, false);

  StepSizes mu{std::vector<double>(n, config.mu)};
  std::vector<NetworkState> states(num_algos, NetworkState::zeros(layout));
  std::vector<IncrementalState> inc_states(num_algos, IncrementalState::zeros(layout));
  std::vector<AdaptiveCombinerState> adapt_states;
  for (const auto& algo : algos)
    adapt_states.push_back(AdaptiveCombinerState::init(layout, config.adaptive_nu));

  const int window_len = t_max - window_start;
  std::vector<Observation> obs(n);
  std::vector<Matrix> fresh_u(n);
  for (int t = 0; t < t_max; ++t) {
    for (int k = 0; k < n; ++k)
      obs[k] = cr ? cr_gen_observation(k, *cr, rng_obs)
                  : sampler->draw(k, truth, layout, rng_obs);
    const bool in_window = t >= window_start;
    if (emse && in_window)
      for (int k = 0; k < n; ++k) fresh_u[k] = sampler->draw_u(k, rng_eval);

    for (int a = 0; a < num_algos; ++a) {
      if (!partial.diverged[a]) {
        switch (algos[a].spec.kind) {
          case AlgorithmKind::kCta:
            states[a] = cta_step(states[a], algos[a].policy, algos[a].topology, layout,
                                 obs, mu);
            break;
          case AlgorithmKind::kAtc:
            states[a] = atc_step(states[a], algos[a].policy, algos[a].topology, layout,
                                 obs, mu,
                                 algos[a].spec.adaptive_weights ? &adapt_states[a]
                                                                : nullptr);
            break;
          case AlgorithmKind::kGeneral:
            states[a] = general_step(states[a], algos[a].policy, algos[a].topology,
                                     layout, obs, mu,
                                     algos[a].spec.adaptive_weights ? &adapt_states[a]
                                                                    : nullptr);
            break;
          case AlgorithmKind::kNonCooperative:
            states[a] = noncoop_step(states[a], layout, obs, mu);
            break;
          case AlgorithmKind::kIncremental:
            incremental_cycle(inc_states[a], layout, obs, mu);
            states[a].q = incremental_stacked(inc_states[a], layout);
            break;
        }
      }

      const ErrorBreakdown err = empirical_msd(states[a].q, truth, layout);
      for (double e : err.node)
        if (!(e < thresh2)) partial.diverged[a] = true;

      auto& cols = partial.values[a];
      int c = 0;
      cols[c++][t] = err.net;
      for (int k = 0; k < n; ++k) cols[c++][t] = err.node[k];
      cols[c++][t] = err.net_global;
      for (int j = 0; j < layout.num_clusters(); ++j) cols[c++][t] = err.net_common[j];
      cols[c++][t] = err.net_local;
      double emse_net = 0.0;
      if (emse && in_window) {
        std::vector<double> e_node(n);
        for (int k = 0; k < n; ++k) {
          e_node[k] = empirical_emse(states[a].q, truth, layout, k, fresh_u[k]);
          emse_net += e_node[k] / n;
        }
        cols[c++][t] = emse_net;
        for (int k = 0; k < n; ++k) cols[c++][t] = e_node[k];
        for (int k = 0; k < n; ++k)
          partial.emse_ss[a][k] += e_node[k] / window_len;
        partial.emse_net_ss[a] += emse_net / window_len;
      }
      if (in_window) {
        for (int k = 0; k < n; ++k) partial.msd_ss[a][k] += err.node[k] / window_len;
        partial.msd_net_ss[a] += err.net / window_len;
      }
    }
  }
  return partial;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();

  ExperimentResult result;
  result.config = config;
  Rng master(mix_seed(config.seed, 0, 0));
  if (config.cr) {
    result.cr = make_cr_scenario(config.layout.num_nodes, config.cr_num_pu,
                                 config.cr_num_basis, config.cr_num_freqs,
                                 config.layout.cluster_members, config.cr_basis_std,
                                 config.cr_tap_var, config.cr_z_std_lo, config.cr_z_std_hi,
                                 config.cr_atten_std_lo, config.cr_atten_std_hi, master);
    result.layout = result.cr->layout;
    result.truth = result.cr->truth;
  } else {
    result.layout = config.layout;
    result.truth = random_truth(config.layout, master);
    result.stats = make_ar_stats(config.layout, result.truth, config.noise_var,
                                 config.snr_lo_db, config.snr_hi_db,
                                 config.ar_alpha_max, master);
  }
  const InterestLayout& layout = result.layout;

  std::vector<AlgoRuntime> algos;
  for (const auto& spec : config.algorithms) {
    AlgoRuntime rt;
    rt.spec = spec;
    rt.topology = spec.clique ? complete_topology(layout.num_nodes) : config.topology;
    const auto diag = validate_topology(rt.topology, layout);
    if (!diag.ok())
      throw std::invalid_argument("topology invalid for algorithm " + spec.name() + ": " +
                                  (diag.messages.empty() ? "unknown" : diag.messages[0]));
    rt.policy = uniform_policy(rt.topology, layout);
    rt.policy.mode = spec.kind == AlgorithmKind::kCta   ? DiffusionMode::kCta
                     : spec.kind == AlgorithmKind::kAtc ? DiffusionMode::kAtc
                                                        : DiffusionMode::kGeneral;
    algos.push_back(std::move(rt));
    result.policies.push_back(algos.back().policy);
  }

  // Theory once from population moments (generic scenario, static weights).
  StepSizes mu{std::vector<double>(layout.num_nodes, config.mu)};
  for (const auto& rt : algos) {
    const bool analyzable = !config.cr && config.with_theory &&
                            !rt.spec.adaptive_weights &&
                            (rt.spec.kind == AlgorithmKind::kCta ||
                             rt.spec.kind == AlgorithmKind::kAtc ||
                             rt.spec.kind == AlgorithmKind::kGeneral);
    if (analyzable)
      result.theory.push_back(steady_state(layout, result.stats, rt.policy, mu,
                                           config.use_fourth_order, config.dim_cap));
    else
      result.theory.push_back(std::nullopt);
  }

  // Monte Carlo runs on a worker pool; partials merged in run order so worker
  // count never changes the output.
  const bool emse = config.track_emse && !config.cr;
  const auto columns = metric_columns(layout, emse);
  const int num_cols = static_cast<int>(columns.size());
  const int num_algos = static_cast<int>(algos.size());
  const int n = layout.num_nodes;
  const int t_max = config.iterations;

  std::vector<std::vector<std::vector<double>>> sum(
      num_algos, std::vector<std::vector<double>>(num_cols, std::vector<double>(t_max, 0.0)));
  auto sumsq = sum;
  std::vector<std::vector<double>> ss_sum(num_algos, std::vector<double>(2 * n + 2, 0.0));
  auto ss_sumsq = ss_sum;
  std::vector<bool> diverged(num_algos, false);
  std::vector<int> first_diverged(num_algos, -1);

  std::mutex mtx;
  std::condition_variable cv;
  std::map<int, RunPartial> pending;
  int next_run = 0, next_merge = 0;

  auto merge = [&](int run, const RunPartial& partial) {
    for (int a = 0; a < num_algos; ++a) {
      for (int c = 0; c < num_cols; ++c)
        for (int t = 0; t < t_max; ++t) {
          const double v = partial.values[a][c][t];
          sum[a][c][t] += v;
          sumsq[a][c][t] += v * v;
        }
      std::vector<double> scalars;
      scalars.insert(scalars.end(), partial.msd_ss[a].begin(), partial.msd_ss[a].end());
      scalars.insert(scalars.end(), partial.emse_ss[a].begin(), partial.emse_ss[a].end());
      scalars.push_back(partial.msd_net_ss[a]);
      scalars.push_back(partial.emse_net_ss[a]);
      for (size_t i = 0; i < scalars.size(); ++i) {
        ss_sum[a][i] += scalars[i];
        ss_sumsq[a][i] += scalars[i] * scalars[i];
      }
      if (partial.diverged[a] && !diverged[a]) {
        diverged[a] = true;
        first_diverged[a] = run;
      }
    }
  };

  auto worker = [&]() {
    while (true) {
      int run;
      {
        std::lock_guard lock(mtx);
        if (next_run >= config.runs) return;
        run = next_run++;
      }
      RunPartial partial = simulate_run(config, layout, result.truth, result.stats,
                                        result.cr ? &*result.cr : nullptr, algos, run);
      {
        std::lock_guard lock(mtx);
        pending.emplace(run, std::move(partial));
      }
      cv.notify_one();
    }
  };

  int num_workers = config.workers > 0
                        ? config.workers
                        : static_cast<int>(std::thread::hardware_concurrency());
  num_workers = std::max(1, std::min(num_workers, config.runs));
  std::vector<std::thread> pool;
  for (int w = 0; w < num_workers; ++w) pool.emplace_back(worker);
  {
    std::unique_lock lock(mtx);
    while (next_merge < config.runs) {
      cv.wait(lock, [&] { return pending.count(next_merge) > 0; });
      while (pending.count(next_merge) > 0) {
        auto node = pending.extract(next_merge);
        merge(next_merge, node.mapped());
        ++next_merge;
      }
    }
  }
  for (auto& t : pool) t.join();

  const double r = static_cast<double>(config.runs);
  auto stderr_of = [&](double s, double sq) {
    if (config.runs < 2) return 0.0;
    const double var = std::max(0.0, (sq - s * s / r) / (r - 1.0));
    return std::sqrt(var / r);
  };

  for (int a = 0; a < num_algos; ++a) {
    MetricsSeries series;
    series.algo = algos[a].spec.name();
    series.iterations = t_max;
    series.columns = columns;
    series.mean.assign(num_cols, std::vector<double>(t_max, 0.0));
    series.stderr_.assign(num_cols, std::vector<double>(t_max, 0.0));
    for (int c = 0; c < num_cols; ++c)
      for (int t = 0; t < t_max; ++t) {
        series.mean[c][t] = sum[a][c][t] / r;
        series.stderr_[c][t] = stderr_of(sum[a][c][t], sumsq[a][c][t]);
      }
    for (int k = 0; k < n; ++k) {
      series.msd_ss.push_back(ss_sum[a][k] / r);
      series.msd_ss_se.push_back(stderr_of(ss_sum[a][k], ss_sumsq[a][k]));
      series.emse_ss.push_back(ss_sum[a][n + k] / r);
      series.emse_ss_se.push_back(stderr_of(ss_sum[a][n + k], ss_sumsq[a][n + k]));
    }
    series.msd_net_ss = ss_sum[a][2 * n] / r;
    series.msd_net_ss_se = stderr_of(ss_sum[a][2 * n], ss_sumsq[a][2 * n]);
    series.emse_net_ss = ss_sum[a][2 * n + 1] / r;
    series.emse_net_ss_se = stderr_of(ss_sum[a][2 * n + 1], ss_sumsq[a][2 * n + 1]);
    series.diverged = diverged[a];
    series.first_diverged_run = first_diverged[a];
    result.any_diverged = result.any_diverged || diverged[a];
    result.series.push_back(std::move(series));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Result emission

namespace {

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<std::pair<std::string, const std::vector<double>*>>&
                        curves_db) {
  const double width = 760, height = 420, ml = 60, mr = 140, mt = 36, mb = 44;
  double lo = 1e300, hi = -1e300;
  size_t t_max = 0;
  for (const auto& [name, ys] : curves_db) {
    t_max = std::max(t_max, ys->size());
    for (double y : *ys)
      if (std::isfinite(y)) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
  }
  if (t_max == 0 || lo > hi) {
    lo = -1;
    hi = 1;
    t_max = 1;
  }
  const double span = std::max(1e-9, hi - lo);
  auto xpix = [&](double t) { return ml + t / std::max<size_t>(1, t_max - 1) * (width - ml - mr); };
  auto ypix = [&](double v) { return mt + (hi - v) / span * (height - mt - mb); };

  std::ofstream out(path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
      << height << "'>\n<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << width / 2 << "' y='20' text-anchor='middle' font-size='14'>"
      << title << "</text>\n";
  // axes
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
      << height - mb << "' stroke='black'/>\n<line x1='" << ml << "' y1='" << height - mb
      << "' x2='" << width - mr << "' y2='" << height - mb << "' stroke='black'/>\n";
  for (int g = 0; g <= 4; ++g) {
    const double v = lo + span * g / 4.0;
    out << "<text x='" << ml - 6 << "' y='" << ypix(v) + 4
        << "' text-anchor='end' font-size='10'>" << static_cast<int>(std::round(v))
        << "</text>\n";
    const double t = static_cast<double>(t_max - 1) * g / 4.0;
    out << "<text x='" << xpix(t) << "' y='" << height - mb + 16
        << "' text-anchor='middle' font-size='10'>" << static_cast<int>(std::round(t))
        << "</text>\n";
  }
  out << "<text x='" << ml - 40 << "' y='" << (mt + height - mb) / 2
      << "' font-size='11' transform='rotate(-90 " << ml - 40 << " "
      << (mt + height - mb) / 2 << ")'>dB</text>\n<text x='"
      << (ml + width - mr) / 2 << "' y='" << height - 8
      << "' text-anchor='middle' font-size='11'>iteration</text>\n";
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  int ci = 0;
  for (const auto& [name, ys] : curves_db) {
    const char* color = palette[ci % 8];
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.2' points='";
    for (size_t t = 0; t < ys->size(); ++t) {
      const double y = (*ys)[t];
      if (!std::isfinite(y)) continue;
      out << xpix(static_cast<double>(t)) << "," << ypix(y) << " ";
    }
    out << "'/>\n<text x='" << width - mr + 8 << "' y='" << mt + 14 * ci + 10
        << "' font-size='11' fill='" << color << "'>" << name << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("failed to write " + path);
}

void dump_matrix(std::ofstream& out, const std::string& name, const Matrix& m) {
  out << "# " << name << " (" << m.rows() << " x " << m.cols() << ")\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out << (j ? " " : "") << m(i, j);
    out << "\n";
  }
  out << "\n";
}

}  // namespace

std::vector<std::string> emit_results(const ExperimentResult& result,
                                      const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output dir " + dir + ": " + ec.message());
  std::vector<std::string> written;

  // Columnar series table.
  const std::string csv_path = dir + "/series.csv";
  {
    std::ofstream out(csv_path);
    out << "algo,t,metric,scope,value,stderr\n";
    out.precision(17);
    for (const auto& series : result.series) {
      for (size_t c = 0; c < series.columns.size(); ++c) {
        // Column ids look like "msd:node:3"; metric is the first token, scope
        // the rest.
        const std::string& col = series.columns[c];
        const auto cut = col.find(':');
        const std::string metric = col.substr(0, cut);
        const std::string scope = col.substr(cut + 1);
        for (int t = 0; t < series.iterations; ++t)
          out << series.algo << ',' << t << ',' << metric << ',' << scope << ','
              << series.mean[c][t] << ',' << series.stderr_[c][t] << '\n';
      }
    }
    if (!out) throw std::runtime_error("failed to write " + csv_path);
  }
  written.push_back(csv_path);

  // Summary document.
  nlohmann::json summary;
  summary["experiment"] = result.config.name;
  summary["seed"] = result.config.seed;
  summary["runs"] = result.config.runs;
  summary["iterations"] = result.config.iterations;
  summary["mu"] = result.config.mu;
  summary["window"] = result.config.window;
  summary["any_diverged"] = result.any_diverged;
  if (result.cr) {
    summary["cr"]["z_noise_std"] = result.cr->z_noise_std;
    summary["cr"]["atten_noise_std"] = result.cr->atten_noise_std;
  }
  for (size_t a = 0; a < result.series.size(); ++a) {
    const auto& s = result.series[a];
    nlohmann::json entry;
    entry["diverged"] = s.diverged;
    entry["msd_net_ss"] = s.msd_net_ss;
    entry["msd_net_ss_db"] = to_db(s.msd_net_ss);
    entry["msd_net_ss_se"] = s.msd_net_ss_se;
    entry["emse_net_ss"] = s.emse_net_ss;
    entry["msd_ss"] = s.msd_ss;
    entry["msd_ss_se"] = s.msd_ss_se;
    entry["emse_ss"] = s.emse_ss;
    entry["emse_ss_se"] = s.emse_ss_se;
    if (result.theory[a]) {
      const TheoryReport& th = *result.theory[a];
      entry["theory"]["rho_mean"] = th.rho_mean;
      entry["theory"]["rho_f"] = th.rho_f;
      entry["theory"]["mean_square_stable"] = th.mean_square_stable;
      entry["theory"]["mu_max"] = th.mu_max;
      if (th.mean_square_stable) {
        entry["theory"]["msd_net"] = th.msd_net;
        entry["theory"]["emse_net"] = th.emse_net;
        entry["theory"]["msd"] = th.msd;
        entry["theory"]["emse"] = th.emse;
        entry["theory"]["msd_block"] = th.msd_block;
        std::vector<double> gap_msd, gap_emse;
        for (int k = 0; k < result.layout.num_nodes; ++k) {
          gap_msd.push_back(to_db(s.msd_ss[k]) - to_db(th.msd[k]));
          gap_emse.push_back(to_db(s.emse_ss[k]) - to_db(th.emse[k]));
        }
        entry["gap_db"]["msd"] = gap_msd;
        entry["gap_db"]["emse"] = gap_emse;
      }
    }
    summary["algorithms"][s.algo] = entry;
  }
  const std::string summary_path = dir + "/summary.json";
  {
    std::ofstream out(summary_path);
    out << summary.dump(2) << "\n";
    if (!out) throw std::runtime_error("failed to write " + summary_path);
  }
  written.push_back(summary_path);

  // Policy dump for audit.
  const std::string policy_path = dir + "/policies.txt";
  {
    std::ofstream out(policy_path);
    out.precision(12);
    for (size_t a = 0; a < result.policies.size(); ++a) {
      out << "== algorithm " << result.series[a].algo << " ==\n";
      dump_matrix(out, "C^w", result.policies[a].cw);
      dump_matrix(out, "A^w", result.policies[a].aw);
      for (size_t j = 0; j < result.policies[a].cs.size(); ++j) {
        dump_matrix(out, "C^s_" + std::to_string(j + 1), result.policies[a].cs[j]);
        dump_matrix(out, "A^s_" + std::to_string(j + 1), result.policies[a].as[j]);
      }
    }
    if (!out) throw std::runtime_error("failed to write " + policy_path);
  }
  written.push_back(policy_path);

  // Learning-curve plots (network MSD and the per-block network MSDs).
  auto curve_db = [&](const MetricsSeries& s, const std::string& column,
                      std::vector<double>& buffer) -> const std::vector<double>* {
    auto it = std::find(s.columns.begin(), s.columns.end(), column);
    if (it == s.columns.end()) return nullptr;
    const auto& lin = s.mean[it - s.columns.begin()];
    buffer.resize(lin.size());
    for (size_t t = 0; t < lin.size(); ++t)
      buffer[t] = lin[t] > 0 ? to_db(lin[t]) : std::nan("");
    return &buffer;
  };

  std::vector<std::string> plot_columns{"msd:net", "msd:global:net", "msd:local:net"};
  for (int j = 0; j < result.layout.num_clusters(); ++j)
    plot_columns.push_back("msd:common:" + std::to_string(j + 1) + ":net");
  for (const auto& column : plot_columns) {
    std::vector<std::vector<double>> buffers(result.series.size());
    std::vector<std::pair<std::string, const std::vector<double>*>> curves;
    for (size_t a = 0; a < result.series.size(); ++a) {
      const auto* c = curve_db(result.series[a], column, buffers[a]);
      if (c) curves.emplace_back(result.series[a].algo, c);
    }
    if (curves.empty()) continue;
    std::string fname = column;
    std::replace(fname.begin(), fname.end(), ':', '_');
    const std::string path = dir + "/" + fname + ".svg";
    write_svg_plot(path, column + " (dB)", curves);
    written.push_back(path);
  }
  return written;
}

}  // namespace dnspe
