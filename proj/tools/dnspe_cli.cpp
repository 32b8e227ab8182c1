// Command-line front end: scenario validation, closed-form analysis,
// Monte Carlo simulation, theory-vs-simulation comparison and the
// cognitive-radio demo. Exit codes: 0 ok, 2 validation failure, 3 instability.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dnspe/harness.hpp"

namespace {

using dnspe::ExperimentConfig;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitUnstable = 3;

std::vector<int> int_or_list(const json& j, int count) {
  if (j.is_number_integer()) return std::vector<int>(count, j.get<int>());
  return j.get<std::vector<int>>();
}

// Scenario files use 1-based node and cluster ids; everything in memory is
// 0-based.
ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(in);

  ExperimentConfig config;
  config.name = j.value("name", path);

  const json& jl = j.at("layout");
  const int n = jl.at("nodes").get<int>();
  std::vector<std::pair<std::vector<int>, int>> clusters;
  for (const json& jc : jl.value("clusters", json::array())) {
    std::vector<int> members;
    for (int m : jc.at("members").get<std::vector<int>>()) members.push_back(m - 1);
    clusters.emplace_back(std::move(members), jc.at("common_size").get<int>());
  }
  config.layout = dnspe::build_layout(
      n, jl.value("global_size", 0), clusters,
      int_or_list(jl.value("local_size", json(0)), n),
      int_or_list(jl.at("obs_size"), n));

  if (j.contains("topology")) {
    const json& jt = j.at("topology");
    if (jt.value("complete", false)) {
      config.topology = dnspe::complete_topology(n);
    } else {
      std::vector<std::pair<int, int>> edges;
      for (const json& je : jt.at("edges"))
        edges.emplace_back(je.at(0).get<int>() - 1, je.at(1).get<int>() - 1);
      config.topology = dnspe::topology_from_edges(n, edges);
    }
  } else {
    config.topology = dnspe::complete_topology(n);
  }

  if (j.contains("stats")) {
    const json& js = j.at("stats");
    config.noise_var = js.value("noise_var", config.noise_var);
    if (js.contains("snr_db")) {
      config.snr_lo_db = js.at("snr_db").at(0).get<double>();
      config.snr_hi_db = js.at("snr_db").at(1).get<double>();
    }
    config.ar_alpha_max = js.value("alpha_max", config.ar_alpha_max);
  }

  if (j.contains("cr")) {
    const json& jc = j.at("cr");
    config.cr = jc.value("enabled", true);
    config.cr_num_pu = jc.value("num_pu", config.cr_num_pu);
    config.cr_num_basis = jc.value("num_basis", config.cr_num_basis);
    config.cr_num_freqs = jc.value("num_freqs", config.cr_num_freqs);
    config.cr_basis_std = jc.value("basis_std", config.cr_basis_std);
    config.cr_tap_var = jc.value("tap_var", config.cr_tap_var);
    if (jc.contains("z_std")) {
      config.cr_z_std_lo = jc.at("z_std").at(0).get<double>();
      config.cr_z_std_hi = jc.at("z_std").at(1).get<double>();
    }
    if (jc.contains("atten_std")) {
      config.cr_atten_std_lo = jc.at("atten_std").at(0).get<double>();
      config.cr_atten_std_hi = jc.at("atten_std").at(1).get<double>();
    }
  }

  for (const json& ja : j.at("algorithms")) {
    dnspe::AlgorithmSpec spec;
    const std::string kind = ja.at("kind").get<std::string>();
    if (kind == "cta") spec.kind = dnspe::AlgorithmKind::kCta;
    else if (kind == "atc") spec.kind = dnspe::AlgorithmKind::kAtc;
    else if (kind == "general") spec.kind = dnspe::AlgorithmKind::kGeneral;
    else if (kind == "noncoop") spec.kind = dnspe::AlgorithmKind::kNonCooperative;
    else if (kind == "incremental") spec.kind = dnspe::AlgorithmKind::kIncremental;
    else throw std::runtime_error("unknown algorithm kind: " + kind);
    spec.label = ja.value("label", std::string());
    spec.adaptive_weights = ja.value("adaptive", false);
    spec.clique = ja.value("clique", false);
    config.algorithms.push_back(spec);
  }

  config.mu = j.value("mu", config.mu);
  config.runs = j.value("runs", config.runs);
  config.iterations = j.value("iterations", config.iterations);
  config.window = j.value("window", config.window);
  config.seed = j.value("seed", config.seed);
  config.workers = j.value("workers", config.workers);
  config.use_fourth_order = j.value("fourth_order", config.use_fourth_order);
  config.dim_cap = j.value("dim_cap", config.dim_cap);
  config.adaptive_nu = j.value("adaptive_nu", config.adaptive_nu);
  config.track_emse = j.value("track_emse", config.track_emse);
  config.out_dir = j.value("out_dir", config.out_dir);
  if (const char* env = std::getenv("DNSPE_OUT")) config.out_dir = env;
  return config;
}

// The cognitive-radio demo: N = 10 secondary users, one common interferer
// sensed by {2, 4, 7, 9}, ATC with uniform weights (a), clique topology (b)
// and adaptive weights (c), plus the non-cooperative and incremental
// baselines. Topology: ring with second neighbors, cluster members also
// wired in a cycle.
ExperimentConfig cr_demo_config() {
  ExperimentConfig config;
  config.name = "cr-demo";
  config.cr = true;
  const int n = 10;
  std::vector<int> members{1, 3, 6, 8};  // 0-based {2,4,7,9}
  const int dims = 0;                    // CR layout is derived; placeholder layout
  config.layout = dnspe::build_layout(n, dims, {{members, 1}}, std::vector<int>(n, 1),
                                      std::vector<int>(n, 1));
  std::vector<std::pair<int, int>> edges;
  for (int k = 0; k < n; ++k) {
    edges.emplace_back(k, (k + 1) % n);
    edges.emplace_back(k, (k + 2) % n);
  }
  for (size_t m = 0; m < members.size(); ++m)
    edges.emplace_back(members[m], members[(m + 1) % members.size()]);
  config.topology = dnspe::topology_from_edges(n, edges);

  using dnspe::AlgorithmKind;
  config.algorithms = {
      {AlgorithmKind::kAtc, "atc-uniform", false, false},
      {AlgorithmKind::kAtc, "atc-clique", false, true},
      {AlgorithmKind::kAtc, "atc-adaptive", true, false},
      {AlgorithmKind::kNonCooperative, "noncoop", false, false},
      {AlgorithmKind::kIncremental, "incremental", false, false},
  };
  config.mu = 0.3;
  config.runs = 10;
  config.iterations = 4000;
  config.with_theory = false;
  config.track_emse = false;
  config.out_dir = "out/cr-demo";
  if (const char* env = std::getenv("DNSPE_OUT")) config.out_dir = env;
  return config;
}

int run_validate(const ExperimentConfig& config) {
  bool ok = true;
  for (const auto& spec : config.algorithms) {
    const dnspe::Topology topo =
        spec.clique ? dnspe::complete_topology(config.layout.num_nodes) : config.topology;
    const auto diag = dnspe::validate_topology(topo, config.layout);
    for (const auto& msg : diag.messages)
      std::cout << spec.name() << ": " << msg << "\n";
    if (!diag.ok()) {
      ok = false;
      continue;
    }
    const auto policy = dnspe::uniform_policy(topo, config.layout);
    const auto pdiag = dnspe::validate_policy(policy, topo, config.layout);
    for (const auto& v : pdiag.violations)
      std::cout << spec.name() << ": " << v.what << "\n";
    ok = ok && pdiag.ok();
  }
  std::cout << (ok ? "scenario ok" : "scenario invalid") << "\n";
  return ok ? kExitOk : kExitValidation;
}

int run_theory(const ExperimentConfig& config) {
  if (config.cr) {
    std::cerr << "theory: the cognitive-radio scenario has no closed-form model\n";
    return kExitValidation;
  }
  dnspe::Rng rng(config.seed);
  const auto truth = dnspe::random_truth(config.layout, rng);
  const auto stats = dnspe::make_ar_stats(config.layout, truth, config.noise_var,
                                          config.snr_lo_db, config.snr_hi_db,
                                          config.ar_alpha_max, rng);
  dnspe::StepSizes mu{std::vector<double>(config.layout.num_nodes, config.mu)};
  bool all_stable = true;
  json out;
  for (const auto& spec : config.algorithms) {
    if (spec.kind != dnspe::AlgorithmKind::kCta && spec.kind != dnspe::AlgorithmKind::kAtc &&
        spec.kind != dnspe::AlgorithmKind::kGeneral)
      continue;
    const dnspe::Topology topo =
        spec.clique ? dnspe::complete_topology(config.layout.num_nodes) : config.topology;
    auto policy = dnspe::uniform_policy(topo, config.layout);
    policy.mode = spec.kind == dnspe::AlgorithmKind::kCta   ? dnspe::DiffusionMode::kCta
                  : spec.kind == dnspe::AlgorithmKind::kAtc ? dnspe::DiffusionMode::kAtc
                                                            : dnspe::DiffusionMode::kGeneral;
    const auto report = dnspe::steady_state(config.layout, stats, policy, mu,
                                            config.use_fourth_order, config.dim_cap);
    json entry;
    entry["rho_mean"] = report.rho_mean;
    entry["rho_f"] = report.rho_f;
    entry["mu_max"] = report.mu_max;
    entry["mean_square_stable"] = report.mean_square_stable;
    std::cout << spec.name() << ": rho(B) = " << report.rho_mean
              << ", rho(F) = " << report.rho_f << "\n";
    if (report.mean_square_stable) {
      entry["msd_net"] = report.msd_net;
      entry["emse_net"] = report.emse_net;
      entry["msd"] = report.msd;
      entry["emse"] = report.emse;
      entry["msd_block"] = report.msd_block;
      std::cout << "  network MSD = " << dnspe::to_db(report.msd_net)
                << " dB, network EMSE = " << dnspe::to_db(report.emse_net) << " dB\n";
    } else {
      std::cout << "  unstable configuration\n";
      all_stable = false;
    }
    out[spec.name()] = entry;
  }
  std::filesystem::create_directories(config.out_dir);
  std::ofstream f(config.out_dir + "/theory.json");
  f << out.dump(2) << "\n";
  std::cout << "wrote " << config.out_dir << "/theory.json\n";
  return all_stable ? kExitOk : kExitUnstable;
}

int run_simulate(ExperimentConfig config, bool with_theory) {
  config.with_theory = with_theory;
  const auto result = dnspe::run_experiment(config);
  for (const auto& path : dnspe::emit_results(result, config.out_dir))
    std::cout << "wrote " << path << "\n";
  bool all_stable = true;
  for (size_t a = 0; a < result.series.size(); ++a) {
    const auto& s = result.series[a];
    std::cout << s.algo << ": steady-state network MSD = " << dnspe::to_db(s.msd_net_ss)
              << " dB";
    if (s.diverged) std::cout << "  [diverged at run " << s.first_diverged_run + 1 << "]";
    std::cout << "\n";
    if (with_theory && result.theory[a]) {
      const auto& th = *result.theory[a];
      if (!th.mean_square_stable) {
        std::cout << "  theory: unstable, rho(F) = " << th.rho_f << "\n";
        all_stable = false;
        continue;
      }
      std::cout << "  theory network MSD = " << dnspe::to_db(th.msd_net)
                << " dB\n  per-node gap (dB):";
      for (int k = 0; k < result.layout.num_nodes; ++k)
        std::cout << " " << dnspe::to_db(s.msd_ss[k]) - dnspe::to_db(th.msd[k]);
      std::cout << "\n";
    }
  }
  if (result.any_diverged || !all_stable) return kExitUnstable;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusion LMS simulation and analysis for node-specific estimation"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int runs = 0, iterations = 0, dim_cap = 0;
  bool no_fourth_order = false;
  bool has_seed = false;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("-c,--config", config_path, "scenario file (JSON)");
    if (needs_config) opt->required();
    sub->add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
      has_seed = true;
    });
    sub->add_option("--runs", runs, "number of Monte Carlo runs");
    sub->add_option("--iterations", iterations, "iterations per run");
    sub->add_option("-o,--out", out_dir, "output directory");
    sub->add_flag("--no-fourth-order", no_fourth_order,
                  "drop the fourth-order term in the variance operator");
    sub->add_option("--dim-cap", dim_cap,
                    "max stacked dimension for the dense variance operators");
  };

  auto* cmd_validate = app.add_subcommand("validate", "check scenario and policies");
  auto* cmd_theory = app.add_subcommand("theory", "closed-form steady-state analysis");
  auto* cmd_simulate = app.add_subcommand("simulate", "Monte Carlo simulation only");
  auto* cmd_compare = app.add_subcommand("compare", "simulation with theory gap table");
  auto* cmd_cr = app.add_subcommand("cr-demo", "cognitive-radio spectrum sensing demo");
  add_common(cmd_validate, true);
  add_common(cmd_theory, true);
  add_common(cmd_simulate, true);
  add_common(cmd_compare, true);
  add_common(cmd_cr, false);

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig config =
        app.got_subcommand(cmd_cr) && config_path.empty() ? cr_demo_config()
                                                          : load_config(config_path);
    if (has_seed) config.seed = seed;
    if (runs > 0) config.runs = runs;
    if (iterations > 0) config.iterations = iterations;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (no_fourth_order) config.use_fourth_order = false;
    if (dim_cap > 0) config.dim_cap = dim_cap;
    config.validate();

    if (app.got_subcommand(cmd_validate)) return run_validate(config);
    if (app.got_subcommand(cmd_theory)) return run_theory(config);
    if (app.got_subcommand(cmd_simulate)) return run_simulate(config, false);
    if (app.got_subcommand(cmd_compare)) return run_simulate(config, true);
    if (app.got_subcommand(cmd_cr)) return run_simulate(config, false);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
