#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mailsim/engine.hpp"
#include "mailsim/environment.hpp"
#include "mailsim/schedule.hpp"

namespace mailsim {

// Invalid configuration; the message names the offending line when known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string name = "experiment";
  int depth = 3;
  int breadth = 2;
  int arms = 3;
  long long horizon = 200'000;
  NoiseModel noise = NoiseModel::gaussian(0.1);
  std::vector<std::uint64_t> seeds{1};
  ConstantMode mode;
  long long dense_until = 1000;
  int checkpoints = 100;
  // One environment for every seed, drawn from environment_seed.
  bool shared_environment = false;
  std::uint64_t environment_seed = 0;
  std::optional<std::string> environment_file;
  std::string output_dir = "out";
  int workers = 1;
  bool trace = false;
};

// Parses the JSON config format. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

// Built-in presets: "desk" and "paper-fig2".
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

inline constexpr const char* kSeedCsvHeader =
    "t,player_id,depth,regret_total,regret_action,regret_payment,regret_deviation,"
    "welfare_regret,w1";

std::string format_seed_csv(const Environment& env, const std::vector<LedgerSnapshot>& series);

struct SeedRun {
  std::uint64_t seed = 0;
  std::string csv_path;
  std::string csv;
  RunDiagnostics diagnostics;
  double welfare_optimum = 0.0;
};

// Mean and population standard deviation across seeds of the per-depth
// average of each metric.
std::string format_aggregate_csv(const std::vector<SeedRun>& runs);

struct ExperimentResult {
  GamePlan plan;
  std::vector<SeedRun> runs;
  std::string aggregate_path;
  std::string metadata_path;
};

Environment make_environment(const ExperimentConfig& config, std::uint64_t seed);

ExperimentResult run_experiment(const ExperimentConfig& config);

// t^{1 - 1/(2 d^2)} on `points` geometrically spaced rounds in [1, T].
std::vector<std::pair<long long, double>> reference_curve(int depth, long long horizon,
                                                          int points);
double reference_exponent(int depth);
// Scales a curve so it passes through (anchor_t, anchor_value).
std::vector<std::pair<long long, double>> normalize_curve(
    std::vector<std::pair<long long, double>> curve, long long anchor_t, double anchor_value);

const char* version_string();

}  // namespace mailsim
