#include "mailsim/serialize.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mailsim {

using nlohmann::json;

json environment_to_json(const Environment& env, std::optional<std::uint64_t> seed) {
  json j;
  j["format"] = "mailsim-environment";
  j["version"] = 1;
  j["depth"] = env.tree().depth();
  j["breadth"] = env.tree().breadth();
  j["arms"] = env.arms();
  j["noise"] = {{"kind", to_string(env.noise().kind)}, {"sigma", env.noise().sigma}};
  if (seed) j["seed"] = *seed;
  json nodes = json::array();
  for (const Node& n : env.tree().nodes()) {
    json jn;
    jn["id"] = n.id;
    jn["depth"] = n.depth;
    jn["parent"] = n.parent ? json(*n.parent) : json(nullptr);
    jn["children"] = n.children;
    jn["theta"] = env.theta_table(n.id);
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  return j;
}

Environment environment_from_json(const json& j) {
  if (j.value("format", "") != "mailsim-environment") {
    throw std::invalid_argument("not a mailsim environment file");
  }
  const int depth = j.at("depth").get<int>();
  const int breadth = j.at("breadth").get<int>();
  const int arms = j.at("arms").get<int>();
  NoiseModel noise;
  noise.kind = noise_kind_from_string(j.at("noise").at("kind").get<std::string>());
  noise.sigma = j.at("noise").value("sigma", 0.0);

  std::vector<Node> nodes;
  std::vector<std::vector<double>> theta;
  for (const json& jn : j.at("nodes")) {
    Node n;
    n.id = jn.at("id").get<NodeId>();
    n.depth = jn.at("depth").get<int>();
    if (!jn.at("parent").is_null()) n.parent = jn.at("parent").get<NodeId>();
    n.children = jn.at("children").get<std::vector<NodeId>>();
    nodes.push_back(std::move(n));
    theta.push_back(jn.at("theta").get<std::vector<double>>());
  }
  return Environment(Tree(depth, breadth, std::move(nodes)), arms, noise, std::move(theta));
}

json oracle_to_json(const Environment& env, const OracleSolution& sol) {
  json j;
  j["format"] = "mailsim-oracle";
  j["version"] = 1;
  j["arms"] = env.arms();
  j["welfare_optimum"] = sol.welfare_optimum;
  j["welfare_profile"] = sol.welfare_profile;
  const auto gaps = reward_gaps(env, sol);
  json nodes = json::array();
  for (const Node& n : env.tree().nodes()) {
    const NodeSolution& ns = sol.node(n.id);
    const SpneProfile& p = spne_profile(sol, n.id);
    const NodeGaps& g = gaps[static_cast<std::size_t>(n.id)];
    json jn;
    jn["id"] = n.id;
    jn["depth"] = n.depth;
    jn["mu"] = ns.mu;
    jn["mu_star"] = ns.mu_star;
    jn["tau_star"] = ns.tau_star;
    jn["spne"] = {{"action", p.action},
                  {"recommendations", p.recommendations},
                  {"transfers", p.transfers}};
    jn["gaps"] = {{"child_gaps", g.child_gaps},
                  {"theta_gap", g.theta_gap},
                  {"action_singleton", g.action_singleton},
                  {"recommendation_singleton", g.recommendation_singleton}};
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mailsim
