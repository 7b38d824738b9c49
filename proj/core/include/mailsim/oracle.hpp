#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mailsim/environment.hpp"

namespace mailsim {

// Hindsight quantities of one node, all computed by backward induction.
struct NodeSolution {
  // mu(a, b^ch) = theta(a, b^ch) - sum_w tau*_{b^w}(w), indexed like theta.
  std::vector<double> mu;
  // mu*(a) = max over b^ch of mu(a, b^ch).
  std::vector<double> mu_star;
  // Child-part index (in K^|ch| space) attaining mu*(a); lowest index on ties.
  std::vector<std::size_t> best_children;
  // tau*_b(v): minimal transfer the parent pays so that b is v's best arm.
  std::vector<double> tau_star;
};

// Equilibrium outcome x*^v: own action, recommendations and transfers.
struct SpneProfile {
  Arm action = 0;
  std::vector<Arm> recommendations;
  std::vector<double> transfers;
};

struct OracleSolution {
  std::vector<NodeSolution> nodes;
  std::vector<SpneProfile> profiles;
  double welfare_optimum = 0.0;      // sum_v max_a mu*^v(a)
  std::vector<Arm> welfare_profile;  // the SPNE actions, one per node

  const NodeSolution& node(NodeId v) const { return nodes.at(static_cast<std::size_t>(v)); }
  double best_utility(NodeId v) const;  // max_a mu*^v(a)
};

OracleSolution solve_tree(const Environment& env);

const SpneProfile& spne_profile(const OracleSolution& sol, NodeId v);

class EnumerationTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WelfareOptimum {
  std::vector<Arm> profile;  // one arm per node, indexed by node id
  double value = 0.0;
};

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

// Full enumeration of K^|V| joint profiles; lexicographically smallest
// maximizer. Independent of solve_tree.
WelfareOptimum brute_force_welfare(const Environment& env,
                                   std::size_t cap = kDefaultEnumerationCap);

double profile_welfare(const Environment& env, std::span<const Arm> profile);

struct NodeGaps {
  // Per child w: min over b != b*^w of mu(a*, b*) - mu(a*, b* with w -> b).
  std::vector<double> child_gaps;
  // Min over a of the theta gap between the best and second-best child
  // part; over own arms for leaves.
  double theta_gap = 0.0;
  bool action_singleton = true;          // argmax_a mu*(a) unique
  bool recommendation_singleton = true;  // argmax_b mu(a*, b) unique
};

std::vector<NodeGaps> reward_gaps(const Environment& env, const OracleSolution& sol);

}  // namespace mailsim
