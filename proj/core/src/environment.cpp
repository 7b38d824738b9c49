#include "mailsim/environment.hpp"

#include <stdexcept>
#include <utility>

namespace mailsim {

Tree::Tree(int depth, int breadth, std::vector<Node> nodes)
    : depth_(depth), breadth_(breadth), nodes_(std::move(nodes)) {
  if (depth_ < 1 || breadth_ < 1) {
    throw std::invalid_argument("tree depth and breadth must be >= 1");
  }
  if (nodes_.size() != expected_node_count(depth_, breadth_)) {
    throw std::invalid_argument("tree has " + std::to_string(nodes_.size()) +
                                " nodes, expected " +
                                std::to_string(expected_node_count(depth_, breadth_)));
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.id != static_cast<NodeId>(i)) {
      throw std::invalid_argument("node ids must be 0..n-1 in order");
    }
    if (i == 0) {
      if (n.parent || n.depth != depth_) {
        throw std::invalid_argument("node 0 must be the root at depth D");
      }
    } else {
      // Breadth-first numbering puts every parent before its children,
      // which also rules out cycles.
      if (!n.parent || *n.parent < 0 || *n.parent >= n.id) {
        throw std::invalid_argument("node " + std::to_string(n.id) +
                                    " has an invalid parent");
      }
      const Node& p = nodes_[static_cast<std::size_t>(*n.parent)];
      if (p.depth != n.depth + 1) {
        throw std::invalid_argument("node " + std::to_string(n.id) +
                                    " depth inconsistent with parent");
      }
      bool listed = false;
      for (NodeId c : p.children) listed = listed || c == n.id;
      if (!listed) {
        throw std::invalid_argument("parent of node " + std::to_string(n.id) +
                                    " does not list it as a child");
      }
    }
    const std::size_t want = n.depth > 1 ? static_cast<std::size_t>(breadth_) : 0;
    if (n.children.size() != want) {
      throw std::invalid_argument("node " + std::to_string(n.id) +
                                  " has the wrong number of children");
    }
    for (NodeId c : n.children) {
      if (c <= n.id || c >= static_cast<NodeId>(nodes_.size()) ||
          nodes_[static_cast<std::size_t>(c)].parent != n.id) {
        throw std::invalid_argument("child links of node " + std::to_string(n.id) +
                                    " are inconsistent");
      }
    }
  }
}

std::vector<NodeId> Tree::nodes_at_depth(int d) const {
  std::vector<NodeId> out;
  for (const Node& n : nodes_) {
    if (n.depth == d) out.push_back(n.id);
  }
  return out;
}

std::size_t expected_node_count(int depth, int breadth) {
  if (breadth == 1) return static_cast<std::size_t>(depth);
  const std::size_t b = static_cast<std::size_t>(breadth);
  return (int_pow(b, depth) - 1) / (b - 1);
}

Tree build_tree(int depth, int breadth) {
  if (depth < 1 || breadth < 1) {
    throw std::invalid_argument("build_tree: depth and breadth must be >= 1");
  }
  std::vector<Node> nodes;
  nodes.reserve(expected_node_count(depth, breadth));
  nodes.push_back(Node{0, depth, std::nullopt, {}});
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].depth == 1) continue;
    for (int c = 0; c < breadth; ++c) {
      const NodeId id = static_cast<NodeId>(nodes.size());
      const int child_depth = nodes[i].depth - 1;
      nodes[i].children.push_back(id);
      nodes.push_back(Node{id, child_depth, static_cast<NodeId>(i), {}});
    }
  }
  return Tree(depth, breadth, std::move(nodes));
}

std::size_t int_pow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

std::size_t encode_joint(std::span<const Arm> joint, int arms) {
  std::size_t idx = 0;
  for (Arm a : joint) {
    if (a < 0 || a >= arms) throw std::out_of_range("arm index out of range");
    idx = idx * static_cast<std::size_t>(arms) + static_cast<std::size_t>(a);
  }
  return idx;
}

std::vector<Arm> decode_joint(std::size_t index, int arms, int arity) {
  std::vector<Arm> joint(static_cast<std::size_t>(arity));
  for (int i = arity - 1; i >= 0; --i) {
    joint[static_cast<std::size_t>(i)] = static_cast<Arm>(index % static_cast<std::size_t>(arms));
    index /= static_cast<std::size_t>(arms);
  }
  return joint;
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kGaussian:
      return "gaussian";
    case NoiseKind::kBernoulliCentered:
      return "bernoulli-centered";
    case NoiseKind::kNone:
      return "none";
  }
  return "unknown";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "gaussian") return NoiseKind::kGaussian;
  if (name == "bernoulli-centered") return NoiseKind::kBernoulliCentered;
  if (name == "none") return NoiseKind::kNone;
  throw std::invalid_argument("unknown noise kind '" + name + "'");
}

double NoiseModel::sample(double mean, RngStream& rng) const {
  switch (kind) {
    case NoiseKind::kGaussian: {
      std::normal_distribution<double> dist(0.0, sigma);
      return dist(rng);
    }
    case NoiseKind::kBernoulliCentered: {
      std::bernoulli_distribution dist(mean);
      return (dist(rng) ? 1.0 : 0.0) - mean;
    }
    case NoiseKind::kNone:
      return 0.0;
  }
  return 0.0;
}

Environment::Environment(Tree tree, int arms, NoiseModel noise,
                         std::vector<std::vector<double>> theta)
    : tree_(std::move(tree)), arms_(arms), noise_(noise), theta_(std::move(theta)) {
  if (arms_ < 2) throw std::invalid_argument("environment needs K >= 2 arms");
  if (noise_.kind == NoiseKind::kGaussian && !(noise_.sigma >= 0.0)) {
    throw std::invalid_argument("gaussian noise needs sigma >= 0");
  }
  if (theta_.size() != tree_.size()) {
    throw std::invalid_argument("one theta table per node is required");
  }
  for (const Node& n : tree_.nodes()) {
    const auto& table = theta_[static_cast<std::size_t>(n.id)];
    const std::size_t want = int_pow(static_cast<std::size_t>(arms_),
                                     static_cast<int>(n.children.size()) + 1);
    if (table.size() != want) {
      throw std::invalid_argument("theta table of node " + std::to_string(n.id) +
                                  " has " + std::to_string(table.size()) +
                                  " entries, expected " + std::to_string(want));
    }
    for (double x : table) {
      if (!(x >= 0.0 && x <= 1.0)) {
        throw std::invalid_argument("theta entries must lie in [0, 1]");
      }
    }
  }
}

std::size_t Environment::checked_index(NodeId v, std::span<const Arm> joint) const {
  if (static_cast<int>(joint.size()) != arity(v)) {
    throw std::invalid_argument("joint action arity " + std::to_string(joint.size()) +
                                " does not match node " + std::to_string(v));
  }
  return encode_joint(joint, arms_);
}

double Environment::theta(NodeId v, std::span<const Arm> joint) const {
  return theta(v, checked_index(v, joint));
}

Environment sample_environment(const Tree& tree, int arms, RngStream& rng,
                               NoiseModel noise) {
  if (arms < 2) throw std::invalid_argument("sample_environment: K must be >= 2");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::vector<double>> theta;
  theta.reserve(tree.size());
  for (const Node& n : tree.nodes()) {
    const std::size_t count = int_pow(static_cast<std::size_t>(arms),
                                      static_cast<int>(n.children.size()) + 1);
    std::vector<double> table(count);
    for (double& x : table) x = unif(rng);
    theta.push_back(std::move(table));
  }
  return Environment(tree, arms, noise, std::move(theta));
}

double draw_reward(const Environment& env, NodeId v, std::span<const Arm> joint,
                   RngStream& rng) {
  return draw_reward(env, v, env.checked_index(v, joint), rng);
}

double draw_reward(const Environment& env, NodeId v, std::size_t joint_index,
                   RngStream& rng) {
  const double mean = env.theta(v, joint_index);
  return mean + env.noise().sample(mean, rng);
}

}  // namespace mailsim
