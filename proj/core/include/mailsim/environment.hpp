#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mailsim/rng.hpp"

namespace mailsim {

// Arms are 0-based: the action set is {0, ..., K-1}.
using Arm = int;
using NodeId = int;

struct Node {
  NodeId id = 0;
  int depth = 1;  // leaves sit at depth 1, the root at depth D
  std::optional<NodeId> parent;
  std::vector<NodeId> children;

  bool is_leaf() const { return children.empty(); }
};

// Complete B-ary tree numbered breadth-first from the root (id 0), so a
// parent's id is always smaller than its children's.
class Tree {
 public:
  Tree(int depth, int breadth, std::vector<Node> nodes);

  int depth() const { return depth_; }
  int breadth() const { return breadth_; }
  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<Node>& nodes() const { return nodes_; }
  NodeId root() const { return 0; }

  std::vector<NodeId> nodes_at_depth(int d) const;

 private:
  int depth_;
  int breadth_;
  std::vector<Node> nodes_;
};

Tree build_tree(int depth, int breadth);

std::size_t expected_node_count(int depth, int breadth);

// Row-major encoding of a joint action (own arm first, then children in
// child order), so the own arm is the most significant digit.
std::size_t int_pow(std::size_t base, int exp);
std::size_t encode_joint(std::span<const Arm> joint, int arms);
std::vector<Arm> decode_joint(std::size_t index, int arms, int arity);
inline Arm own_arm_of(std::size_t index, int arms, int arity) {
  return static_cast<Arm>(index / int_pow(static_cast<std::size_t>(arms), arity - 1));
}

enum class NoiseKind { kGaussian, kBernoulliCentered, kNone };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

struct NoiseModel {
  NoiseKind kind = NoiseKind::kGaussian;
  double sigma = 0.1;  // gaussian only

  static NoiseModel gaussian(double sigma) { return {NoiseKind::kGaussian, sigma}; }
  static NoiseModel bernoulli_centered() { return {NoiseKind::kBernoulliCentered, 0.0}; }
  static NoiseModel none() { return {NoiseKind::kNone, 0.0}; }

  // Zero-mean perturbation for a reward with the given mean. The
  // bernoulli-centered kind realizes X ~ Bernoulli(mean), hence z = X - mean.
  double sample(double mean, RngStream& rng) const;
};

class Environment {
 public:
  Environment(Tree tree, int arms, NoiseModel noise,
              std::vector<std::vector<double>> theta);

  const Tree& tree() const { return tree_; }
  int arms() const { return arms_; }
  const NoiseModel& noise() const { return noise_; }

  // Number of coordinates in node v's joint action: |ch(v)| + 1.
  int arity(NodeId v) const {
    return static_cast<int>(tree_.node(v).children.size()) + 1;
  }
  std::size_t joint_count(NodeId v) const { return theta_.at(static_cast<std::size_t>(v)).size(); }

  const std::vector<double>& theta_table(NodeId v) const {
    return theta_.at(static_cast<std::size_t>(v));
  }
  double theta(NodeId v, std::size_t joint_index) const {
    return theta_table(v).at(joint_index);
  }
  double theta(NodeId v, std::span<const Arm> joint) const;

  std::size_t checked_index(NodeId v, std::span<const Arm> joint) const;

 private:
  Tree tree_;
  int arms_;
  NoiseModel noise_;
  std::vector<std::vector<double>> theta_;
};

// Every theta entry i.i.d. uniform on [0, 1].
Environment sample_environment(const Tree& tree, int arms, RngStream& rng,
                               NoiseModel noise = NoiseModel::gaussian(0.1));

double draw_reward(const Environment& env, NodeId v, std::span<const Arm> joint,
                   RngStream& rng);
double draw_reward(const Environment& env, NodeId v, std::size_t joint_index,
                   RngStream& rng);

}  // namespace mailsim
