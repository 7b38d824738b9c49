#include "mailsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "mailsim/oracle.hpp"
#include "mailsim/serialize.hpp"

#ifndef MAILSIM_VERSION
#define MAILSIM_VERSION "unknown"
#endif

namespace mailsim {

using nlohmann::json;

const char* version_string() { return MAILSIM_VERSION; }

namespace {

int line_at_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Line of the first occurrence of "key" in the source, 0 if absent.
int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  return pos == std::string::npos ? 0 : line_at_offset(text, pos);
}

class ConfigReader {
 public:
  ConfigReader(const std::string& text, std::string origin)
      : text_(text), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const int line = line_of_key(text_, key);
    std::string where = origin_;
    if (line > 0) where += ":" + std::to_string(line);
    throw ConfigError(where + ": '" + key + "': " + what);
  }

  void check_keys(const json& obj, const std::string& name,
                  std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(name, "expected an object");
    for (const auto& item : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || item.key() == a;
      if (!ok) fail(item.key(), "unknown key in '" + name + "'");
    }
  }

  template <typename T>
  T get(const json& obj, const std::string& key, T fallback) const {
    if (!obj.contains(key)) return fallback;
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, "wrong type");
    }
  }

  template <typename T>
  T require(const json& obj, const std::string& key) const {
    if (!obj.contains(key)) fail(key, "missing required key");
    return get<T>(obj, key, T{});
  }

 private:
  const std::string& text_;
  std::string origin_;
};

void write_double(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  out += buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ":" + std::to_string(line_at_offset(text, e.byte)) +
                      ": malformed JSON: " + e.what());
  }
  ConfigReader r(text, origin);
  r.check_keys(root, "config",
               {"name", "tree", "arms", "horizon", "noise", "seeds", "constants", "logging",
                "environment", "output_dir", "workers", "trace"});

  ExperimentConfig c;
  c.name = r.get<std::string>(root, "name", c.name);

  const json tree = root.contains("tree") ? root.at("tree") : json::object();
  r.check_keys(tree, "tree", {"depth", "breadth"});
  c.depth = r.require<int>(tree, "depth");
  c.breadth = r.require<int>(tree, "breadth");
  if (c.depth < 1) r.fail("depth", "must be >= 1");
  if (c.breadth < 1) r.fail("breadth", "must be >= 1");

  c.arms = r.require<int>(root, "arms");
  if (c.arms < 2) r.fail("arms", "must be >= 2");
  c.horizon = r.require<long long>(root, "horizon");
  if (c.horizon < 2) r.fail("horizon", "must be >= 2");

  if (root.contains("noise")) {
    const json& noise = root.at("noise");
    r.check_keys(noise, "noise", {"kind", "sigma"});
    try {
      c.noise.kind = noise_kind_from_string(r.get<std::string>(noise, "kind", "gaussian"));
    } catch (const std::invalid_argument& e) {
      r.fail("kind", e.what());
    }
    c.noise.sigma = r.get<double>(noise, "sigma", c.noise.kind == NoiseKind::kGaussian ? 0.1 : 0.0);
    if (!(c.noise.sigma >= 0.0)) r.fail("sigma", "must be >= 0");
  }

  c.seeds = r.require<std::vector<std::uint64_t>>(root, "seeds");
  if (c.seeds.empty()) r.fail("seeds", "must not be empty");

  if (root.contains("constants")) {
    const json& k = root.at("constants");
    r.check_keys(k, "constants", {"mode", "c_scale", "batch_scale"});
    const std::string mode = r.get<std::string>(k, "mode", "theoretical");
    if (mode == "theoretical") {
      c.mode = ConstantMode::theoretical();
      if (k.contains("c_scale") || k.contains("batch_scale")) {
        r.fail("mode", "c_scale/batch_scale only apply to mode \"scaled\"");
      }
    } else if (mode == "scaled") {
      c.mode = ConstantMode::scaled(r.get<double>(k, "c_scale", 0.05),
                                    r.get<double>(k, "batch_scale", 1.0));
      if (!(c.mode.c_scale > 0.0)) r.fail("c_scale", "must be > 0");
      if (!(c.mode.batch_scale > 0.0)) r.fail("batch_scale", "must be > 0");
    } else {
      r.fail("mode", "must be \"theoretical\" or \"scaled\"");
    }
  }

  if (root.contains("logging")) {
    const json& l = root.at("logging");
    r.check_keys(l, "logging", {"dense_until", "checkpoints"});
    c.dense_until = r.get<long long>(l, "dense_until", c.dense_until);
    c.checkpoints = r.get<int>(l, "checkpoints", c.checkpoints);
    if (c.dense_until < 1) r.fail("dense_until", "must be >= 1");
    if (c.checkpoints < 1) r.fail("checkpoints", "must be >= 1");
  }

  if (root.contains("environment")) {
    const json& e = root.at("environment");
    r.check_keys(e, "environment", {"shared", "seed", "file"});
    c.shared_environment = r.get<bool>(e, "shared", false);
    c.environment_seed = r.get<std::uint64_t>(e, "seed", 0);
    if (e.contains("file")) c.environment_file = r.get<std::string>(e, "file", "");
  }

  c.output_dir = r.get<std::string>(root, "output_dir", c.output_dir);
  c.workers = r.get<int>(root, "workers", 1);
  if (c.workers < 1) r.fail("workers", "must be >= 1");
  c.trace = r.get<bool>(root, "trace", false);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, path);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["tree"] = {{"depth", c.depth}, {"breadth", c.breadth}};
  j["arms"] = c.arms;
  j["horizon"] = c.horizon;
  j["noise"] = {{"kind", to_string(c.noise.kind)}, {"sigma", c.noise.sigma}};
  j["seeds"] = c.seeds;
  j["constants"] = {{"mode", to_string(c.mode.kind)}};
  if (c.mode.is_scaled()) {
    j["constants"]["c_scale"] = c.mode.c_scale;
    j["constants"]["batch_scale"] = c.mode.batch_scale;
  }
  j["logging"] = {{"dense_until", c.dense_until}, {"checkpoints", c.checkpoints}};
  j["environment"] = {{"shared", c.shared_environment}, {"seed", c.environment_seed}};
  if (c.environment_file) j["environment"]["file"] = *c.environment_file;
  j["output_dir"] = c.output_dir;
  j["workers"] = c.workers;
  j["trace"] = c.trace;
  return j;
}

std::vector<std::string> preset_names() { return {"desk", "paper-fig2"}; }

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.noise = NoiseModel::gaussian(0.1);
  if (name == "desk") {
    c.depth = 3;
    c.breadth = 2;
    c.arms = 3;
    c.horizon = 200'000;
    c.mode = ConstantMode::scaled(0.05, 0.05);
    c.seeds.clear();
    for (std::uint64_t s = 1; s <= 20; ++s) c.seeds.push_back(s);
    c.output_dir = "out/desk";
  } else if (name == "paper-fig2") {
    c.depth = 3;
    c.breadth = 3;
    c.arms = 5;
    c.horizon = 1'000'000;
    c.mode = ConstantMode::scaled(0.05, 0.02);
    c.seeds.clear();
    for (std::uint64_t s = 1; s <= 10; ++s) c.seeds.push_back(s);
    c.output_dir = "out/paper-fig2";
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

Environment make_environment(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.environment_file) {
    Environment env = environment_from_json(json::parse(read_text_file(*config.environment_file)));
    if (env.tree().depth() != config.depth || env.tree().breadth() != config.breadth ||
        env.arms() != config.arms) {
      throw ConfigError("environment file shape does not match the config tree/arms");
    }
    return env;
  }
  const std::uint64_t env_seed = config.shared_environment ? config.environment_seed : seed;
  RngStream rng = make_stream(env_seed, 0, StreamPurpose::kEnvironment);
  return sample_environment(build_tree(config.depth, config.breadth), config.arms, rng,
                            config.noise);
}

std::string format_seed_csv(const Environment& env, const std::vector<LedgerSnapshot>& series) {
  std::string out = kSeedCsvHeader;
  out += '\n';
  for (const LedgerSnapshot& s : series) {
    for (const Node& n : env.tree().nodes()) {
      const NodeRegret& r = s.nodes[static_cast<std::size_t>(n.id)];
      out += std::to_string(s.t);
      out += ',';
      out += std::to_string(n.id);
      out += ',';
      out += std::to_string(n.depth);
      for (double x : {r.total, r.action, r.payment, r.deviation, s.welfare,
                       s.w1[static_cast<std::size_t>(n.id)]}) {
        out += ',';
        write_double(out, x);
      }
      out += '\n';
    }
  }
  return out;
}

namespace {

struct ParsedRow {
  long long t;
  int depth;
  std::array<double, 6> values;
};

std::vector<ParsedRow> parse_seed_csv(const std::string& csv) {
  std::vector<ParsedRow> rows;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ParsedRow row{};
    int player = 0;
    if (std::sscanf(line.c_str(), "%lld,%d,%d,%lf,%lf,%lf,%lf,%lf,%lf", &row.t, &player,
                    &row.depth, &row.values[0], &row.values[1], &row.values[2],
                    &row.values[3], &row.values[4], &row.values[5]) != 9) {
      throw std::runtime_error("malformed seed CSV row: " + line);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string format_aggregate_csv(const std::vector<SeedRun>& runs) {
  // (t, depth) -> per-seed averages over the nodes at that depth.
  std::map<std::pair<long long, int>, std::vector<std::array<double, 6>>> cells;
  for (const SeedRun& run : runs) {
    std::map<std::pair<long long, int>, std::pair<std::array<double, 6>, int>> acc;
    for (const ParsedRow& row : parse_seed_csv(run.csv)) {
      auto& [sum, n] = acc[{row.t, row.depth}];
      for (std::size_t i = 0; i < 6; ++i) sum[i] += row.values[i];
      ++n;
    }
    for (auto& [key, val] : acc) {
      std::array<double, 6> mean{};
      for (std::size_t i = 0; i < 6; ++i) mean[i] = val.first[i] / val.second;
      cells[key].push_back(mean);
    }
  }

  std::string out =
      "t,depth,seeds,mean_regret_total,std_regret_total,mean_regret_action,std_regret_action,"
      "mean_regret_payment,std_regret_payment,mean_regret_deviation,std_regret_deviation,"
      "mean_welfare_regret,std_welfare_regret,mean_w1,std_w1\n";
  for (const auto& [key, samples] : cells) {
    out += std::to_string(key.first);
    out += ',';
    out += std::to_string(key.second);
    out += ',';
    out += std::to_string(samples.size());
    for (std::size_t i = 0; i < 6; ++i) {
      double mean = 0.0;
      for (const auto& s : samples) mean += s[i];
      mean /= static_cast<double>(samples.size());
      double var = 0.0;
      for (const auto& s : samples) var += (s[i] - mean) * (s[i] - mean);
      var /= static_cast<double>(samples.size());
      out += ',';
      write_double(out, mean);
      out += ',';
      write_double(out, std::sqrt(var));
    }
    out += '\n';
  }
  return out;
}

namespace {

json plan_to_json(const GamePlan& plan) {
  json j;
  j["tree_depth"] = plan.tree_depth;
  j["breadth"] = plan.breadth;
  j["arms"] = plan.arms;
  j["horizon"] = plan.horizon;
  j["constant_mode"] = to_string(plan.mode.kind);
  j["horizon_guardrail"] = plan.horizon_guardrail;
  j["minimum_horizon"] = plan.minimum_horizon();
  j["warnings"] = plan.warnings;
  json depths = json::array();
  for (const DepthPlan& d : plan.depths) {
    json jd;
    jd["depth"] = d.depth;
    jd["assumption"] = {{"wait", d.own.wait},
                        {"constant", d.own.constant},
                        {"kappa", d.own.kappa},
                        {"zeta", d.own.zeta}};
    if (d.schedule) {
      jd["schedule"] = {{"eta", d.schedule->eta},
                        {"alpha", d.schedule->alpha},
                        {"beta", d.schedule->beta},
                        {"batch_length", d.schedule->batch_length},
                        {"batch_count", d.schedule->batch_count}};
      jd["children"] = {{"wait", d.children.wait},
                        {"constant", d.children.constant},
                        {"kappa", d.children.kappa},
                        {"zeta", d.children.zeta}};
      jd["search_constant"] = d.search_constant;
    }
    jd["wait"] = d.wait;
    jd["explore_length"] = d.explore_length;
    jd["commit_start"] = d.commit_start();
    depths.push_back(std::move(jd));
  }
  j["depths"] = std::move(depths);
  return j;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec || !fs::is_directory(config.output_dir)) {
    throw std::runtime_error("cannot create output directory '" + config.output_dir + "'");
  }
  const std::string probe = (fs::path(config.output_dir) / ".write_probe").string();
  write_text_file_atomic(probe, "");
  fs::remove(probe, ec);

  ExperimentResult result;
  result.plan = build_plan(config.depth, config.breadth, config.arms, config.horizon, config.mode);
  result.runs.resize(config.seeds.size());

  const std::vector<long long> grid =
      checkpoint_grid(config.horizon, config.dense_until, config.checkpoints);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= config.seeds.size()) return;
      try {
        const std::uint64_t seed = config.seeds[i];
        const Environment env = make_environment(config, seed);
        const OracleSolution sol = solve_tree(env);
        GameOptions opts;
        opts.horizon = config.horizon;
        opts.mode = config.mode;
        opts.master_seed = seed;
        opts.checkpoints = grid;
        std::ostringstream trace;
        if (config.trace) opts.trace = &trace;
        GameResult game = run_game(env, sol, opts);

        SeedRun& run = result.runs[i];
        run.seed = seed;
        run.diagnostics = game.diagnostics;
        run.welfare_optimum = sol.welfare_optimum;
        run.csv = format_seed_csv(env, game.series);
        const fs::path dir(config.output_dir);
        run.csv_path = (dir / ("seed_" + std::to_string(seed) + ".csv")).string();
        write_text_file_atomic(run.csv_path, run.csv);
        write_text_file_atomic(
            (dir / ("environment_seed_" + std::to_string(seed) + ".json")).string(),
            environment_to_json(env, seed).dump(1) + "\n");
        if (config.trace) {
          write_text_file_atomic((dir / ("trace_seed_" + std::to_string(seed) + ".txt")).string(),
                                 trace.str());
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.seeds.size();
        return;
      }
    }
  };

  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(config.workers), config.seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  const fs::path dir(config.output_dir);
  result.aggregate_path = (dir / "aggregate.csv").string();
  write_text_file_atomic(result.aggregate_path, format_aggregate_csv(result.runs));

  json meta;
  meta["version"] = version_string();
  meta["config"] = config_to_json(config);
  meta["plan"] = plan_to_json(result.plan);
  meta["constants_note"] =
      config.mode.is_scaled()
          ? "scaled: search constant c = c_scale at every depth, batch length scaled by "
            "batch_scale"
          : "theoretical: constants from the assumption-parameter recursion";
  json runs = json::array();
  for (const SeedRun& run : result.runs) {
    runs.push_back({{"seed", run.seed},
                    {"csv", fs::path(run.csv_path).filename().string()},
                    {"welfare_optimum", run.welfare_optimum},
                    {"max_conservation_error", run.diagnostics.max_conservation_error},
                    {"conservation_violations", run.diagnostics.conservation_violations},
                    {"decomposition_violations", run.diagnostics.decomposition_violations},
                    {"negative_welfare_increments",
                     run.diagnostics.negative_welfare_increments}});
  }
  meta["runs"] = std::move(runs);
  result.metadata_path = (dir / "metadata.json").string();
  write_text_file_atomic(result.metadata_path, meta.dump(2) + "\n");
  return result;
}

double reference_exponent(int depth) {
  if (depth < 1) throw std::invalid_argument("reference_exponent: depth must be >= 1");
  return 1.0 - 1.0 / (2.0 * depth * depth);
}

std::vector<std::pair<long long, double>> reference_curve(int depth, long long horizon,
                                                          int points) {
  if (horizon < 2) throw std::invalid_argument("reference_curve: T must be >= 2");
  if (points < 1) throw std::invalid_argument("reference_curve: points must be >= 1");
  const double e = reference_exponent(depth);
  std::vector<long long> ts;
  const double hi = std::log(static_cast<double>(horizon));
  for (int i = 0; i < points; ++i) {
    const double frac = points > 1 ? static_cast<double>(i) / (points - 1) : 1.0;
    ts.push_back(std::clamp(std::llround(std::exp(frac * hi)), 1LL, horizon));
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<std::pair<long long, double>> out;
  for (long long t : ts) out.emplace_back(t, std::pow(static_cast<double>(t), e));
  return out;
}

std::vector<std::pair<long long, double>> normalize_curve(
    std::vector<std::pair<long long, double>> curve, long long anchor_t, double anchor_value) {
  auto it = std::find_if(curve.begin(), curve.end(),
                         [&](const auto& p) { return p.first == anchor_t; });
  if (it == curve.end() || it->second == 0.0) {
    throw std::invalid_argument("normalize_curve: anchor not on the curve");
  }
  const double scale = anchor_value / it->second;
  for (auto& p : curve) p.second *= scale;
  return curve;
}

}  // namespace mailsim
