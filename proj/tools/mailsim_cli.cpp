#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "mailsim/experiment.hpp"
#include "mailsim/oracle.hpp"
#include "mailsim/search.hpp"
#include "mailsim/serialize.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

enum class Verbosity { kQuiet = 0, kInfo = 1, kDebug = 2 };

// MAILSIM_LOG=quiet|info|debug; defaults to info.
Verbosity verbosity() {
  const char* v = std::getenv("MAILSIM_LOG");
  if (!v) return Verbosity::kInfo;
  const std::string s(v);
  if (s == "quiet" || s == "0") return Verbosity::kQuiet;
  if (s == "debug" || s == "2") return Verbosity::kDebug;
  return Verbosity::kInfo;
}

void log(Verbosity level, const std::string& msg) {
  if (static_cast<int>(verbosity()) >= static_cast<int>(level)) {
    std::cerr << "[mailsim] " << msg << '\n';
  }
}

mailsim::ExperimentConfig resolve_config(const std::string& config, const std::string& preset) {
  if (!preset.empty()) return mailsim::preset_config(preset);
  return mailsim::load_config(config);
}

int cmd_run(const std::string& config_path, const std::string& preset, int seeds,
            const std::string& out, int workers) {
  mailsim::ExperimentConfig config = resolve_config(config_path, preset);
  if (seeds > 0) {
    config.seeds.clear();
    for (int s = 1; s <= seeds; ++s) config.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (!out.empty()) config.output_dir = out;
  if (workers > 0) config.workers = workers;

  const mailsim::GamePlan plan =
      mailsim::build_plan(config.depth, config.breadth, config.arms, config.horizon, config.mode);
  for (const std::string& w : plan.warnings) log(Verbosity::kInfo, "warning: " + w);
  for (const mailsim::DepthPlan& d : plan.depths) {
    log(Verbosity::kDebug, "depth " + std::to_string(d.depth) + ": wait " +
                               std::to_string(d.wait) + ", explore " +
                               std::to_string(d.explore_length) + ", commit at " +
                               std::to_string(d.commit_start()));
  }
  log(Verbosity::kInfo, "running '" + config.name + "' with " +
                            std::to_string(config.seeds.size()) + " seed(s), T=" +
                            std::to_string(config.horizon));
  const auto start = std::chrono::steady_clock::now();
  const mailsim::ExperimentResult result = mailsim::run_experiment(config);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  int failures = 0;
  for (const mailsim::SeedRun& run : result.runs) {
    const auto& d = run.diagnostics;
    if (d.conservation_violations || d.decomposition_violations ||
        d.negative_welfare_increments) {
      ++failures;
      log(Verbosity::kQuiet, "seed " + std::to_string(run.seed) + ": invariant violations");
    }
  }
  log(Verbosity::kInfo, "wrote " + result.aggregate_path + " and " + result.metadata_path +
                            " in " + std::to_string(secs) + " s");
  return failures ? kExitRuntime : 0;
}

int cmd_oracle(const std::string& config_path, const std::string& preset,
               std::optional<std::uint64_t> seed) {
  const mailsim::ExperimentConfig config = resolve_config(config_path, preset);
  const std::uint64_t s = seed.value_or(config.seeds.front());
  const mailsim::Environment env = mailsim::make_environment(config, s);
  const mailsim::OracleSolution sol = mailsim::solve_tree(env);
  nlohmann::json out = mailsim::oracle_to_json(env, sol);
  out["seed"] = s;
  bool ok = true;
  try {
    const mailsim::WelfareOptimum bf = mailsim::brute_force_welfare(env);
    const double diff = std::abs(bf.value - sol.welfare_optimum);
    ok = diff <= 1e-9;
    out["identity_check"] = {{"brute_force_value", bf.value},
                             {"brute_force_profile", bf.profile},
                             {"abs_difference", diff},
                             {"holds", ok}};
  } catch (const mailsim::EnumerationTooLarge& e) {
    out["identity_check"] = {{"skipped", e.what()}};
  }
  std::cout << out.dump(2) << '\n';
  return ok ? 0 : kExitRuntime;
}

void print_search(const mailsim::SearchRun& run) {
  std::printf("tau_star=%.6f\n", run.tau_star);
  std::printf("%6s %10s %10s %10s %10s  %s\n", "batch", "low", "mid", "high", "T_not",
              "outcome");
  for (const mailsim::BatchTrace& b : run.batches) {
    std::printf("%6d %10.6f %10.6f %10.6f %10lld  %s\n", b.batch, b.low, b.mid, b.high,
                b.refusals, mailsim::to_string(b.outcome).c_str());
  }
  std::printf("final low=%.6f high=%.6f estimate=%.6f\n", run.final_low, run.final_high,
              run.estimate);
  std::printf("bracket %s, width bound %s, sandwich %s\n", run.bracket_held ? "held" : "FAILED",
              run.width_bound_held ? "held" : "FAILED",
              run.sandwich_held ? "held" : "FAILED");
}

int cmd_search_demo(std::optional<double> tau_star, std::optional<int> random_count,
                    std::uint64_t seed, const mailsim::SearchDemoParams& params) {
  bool ok = true;
  if (tau_star) {
    if (*tau_star < 0.0 || *tau_star > 1.0) {
      throw mailsim::ConfigError("--tau-star must lie in [0, 1]");
    }
    const mailsim::SearchRun run = mailsim::run_search_demo(*tau_star, params);
    print_search(run);
    ok = run.bracket_held && run.width_bound_held && run.sandwich_held;
  } else {
    mailsim::RngStream rng = mailsim::make_stream(seed, 0, mailsim::StreamPurpose::kSearchDemo);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int held = 0;
    for (int i = 0; i < *random_count; ++i) {
      const mailsim::SearchRun run = mailsim::run_search_demo(unit(rng), params);
      const bool pass = run.bracket_held && run.width_bound_held && run.sandwich_held;
      held += pass;
      if (verbosity() == Verbosity::kDebug) print_search(run);
      std::printf("tau_star=%.6f estimate=%.6f width=%.6f %s\n", run.tau_star, run.estimate,
                  run.final_high - run.final_low, pass ? "ok" : "FAILED");
    }
    std::printf("%d/%d searches satisfied every check\n", held, *random_count);
    ok = held == *random_count;
  }
  return ok ? 0 : kExitRuntime;
}

int cmd_reference(int depth, long long horizon, int points, std::optional<long long> anchor_t,
                  std::optional<double> anchor_value) {
  auto curve = mailsim::reference_curve(depth, horizon, points);
  if (anchor_t || anchor_value) {
    if (!anchor_t || !anchor_value) {
      throw mailsim::ConfigError("--anchor-t and --anchor-value go together");
    }
    curve = mailsim::normalize_curve(std::move(curve), *anchor_t, *anchor_value);
  }
  std::printf("# exponent %.10g\n", mailsim::reference_exponent(depth));
  std::printf("t,value\n");
  for (const auto& [t, v] : curve) std::printf("%lld,%.10g\n", t, v);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for tree-structured principal-agent bandit games"};
  app.set_version_flag("--version", mailsim::version_string());
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  int seeds = 0;
  std::string out;
  int workers = 0;
  auto* run = app.add_subcommand("run", "Run a multi-seed experiment");
  auto* run_config = run->add_option("--config", config_path, "JSON config file");
  auto* run_preset = run->add_option("--preset", preset, "Built-in preset (desk, paper-fig2)");
  run_config->excludes(run_preset);
  run->add_option("--seeds", seeds, "Use seeds 1..N instead of the config list")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out, "Output directory");
  run->add_option("--workers", workers, "Concurrent seeds")->check(CLI::PositiveNumber);

  std::optional<std::uint64_t> oracle_seed;
  auto* oracle = app.add_subcommand("oracle", "Solve one environment by backward induction");
  auto* oracle_config = oracle->add_option("--config", config_path, "JSON config file");
  auto* oracle_preset = oracle->add_option("--preset", preset, "Built-in preset");
  oracle_config->excludes(oracle_preset);
  oracle->add_option("--seed", oracle_seed, "Environment seed (default: first config seed)");

  std::optional<double> tau_star;
  std::optional<int> random_count;
  std::uint64_t demo_seed = 1;
  mailsim::SearchDemoParams params;
  auto* demo = app.add_subcommand("search-demo", "Binary search against an exact responder");
  auto* demo_tau = demo->add_option("--tau-star", tau_star, "Optimal transfer in [0, 1]");
  auto* demo_random = demo->add_option("--random", random_count, "Number of random tau*")
                          ->check(CLI::PositiveNumber);
  demo_tau->excludes(demo_random);
  demo->add_option("--seed", demo_seed, "Seed for --random");
  demo->add_option("--horizon", params.horizon, "Nominal horizon T");
  demo->add_option("--alpha", params.alpha, "Batch exponent");
  demo->add_option("--beta", params.beta, "Step exponent");
  demo->add_option("--eta", params.eta, "Extra payment exponent");
  demo->add_option("--constant", params.constant, "Classification constant c");
  demo->add_option("--kappa", params.kappa, "Responder regret exponent");
  demo->add_option("--breadth", params.breadth, "Breadth B in the extra payment");

  int ref_depth = 1;
  long long ref_horizon = 2;
  int ref_points = 100;
  std::optional<long long> anchor_t;
  std::optional<double> anchor_value;
  auto* ref = app.add_subcommand("reference", "Print the t^{1-1/(2d^2)} reference curve");
  ref->add_option("--depth", ref_depth, "Depth d")->required()->check(CLI::PositiveNumber);
  ref->add_option("--horizon", ref_horizon, "Horizon T")->required();
  ref->add_option("--points", ref_points, "Number of grid points")->check(CLI::PositiveNumber);
  ref->add_option("--anchor-t", anchor_t, "Round to normalize at");
  ref->add_option("--anchor-value", anchor_value, "Value at the anchor round");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run || *oracle) {
      if (config_path.empty() && preset.empty()) {
        throw mailsim::ConfigError("one of --config or --preset is required");
      }
    }
    if (*run) return cmd_run(config_path, preset, seeds, out, workers);
    if (*oracle) return cmd_oracle(config_path, preset, oracle_seed);
    if (*demo) {
      if (!tau_star && !random_count) {
        throw mailsim::ConfigError("one of --tau-star or --random is required");
      }
      return cmd_search_demo(tau_star, random_count, demo_seed, params);
    }
    if (*ref) return cmd_reference(ref_depth, ref_horizon, ref_points, anchor_t, anchor_value);
  } catch (const mailsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
