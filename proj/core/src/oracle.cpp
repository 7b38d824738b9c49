#include "mailsim/oracle.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace mailsim {

namespace {

// First index attaining the maximum.
std::size_t argmax_lowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace

double OracleSolution::best_utility(NodeId v) const {
  const auto& ms = node(v).mu_star;
  return *std::max_element(ms.begin(), ms.end());
}

OracleSolution solve_tree(const Environment& env) {
  const Tree& tree = env.tree();
  const std::size_t k = static_cast<std::size_t>(env.arms());
  OracleSolution sol;
  sol.nodes.resize(tree.size());

  // Children have larger ids than parents, so a reverse sweep sees every
  // child before its parent.
  for (std::size_t idx = tree.size(); idx-- > 0;) {
    const Node& n = tree.node(static_cast<NodeId>(idx));
    NodeSolution& ns = sol.nodes[idx];
    const int nch = static_cast<int>(n.children.size());
    const std::size_t child_space = int_pow(k, nch);
    const auto& theta = env.theta_table(n.id);

    ns.mu.resize(theta.size());
    for (std::size_t c = 0; c < child_space; ++c) {
      double cost = 0.0;
      std::size_t rest = c;
      for (int i = nch - 1; i >= 0; --i) {
        const std::size_t b = rest % k;
        rest /= k;
        cost += sol.nodes[static_cast<std::size_t>(n.children[static_cast<std::size_t>(i)])]
                    .tau_star[b];
      }
      for (std::size_t a = 0; a < k; ++a) {
        ns.mu[a * child_space + c] = theta[a * child_space + c] - cost;
      }
    }

    ns.mu_star.resize(k);
    ns.best_children.resize(k);
    for (std::size_t a = 0; a < k; ++a) {
      std::span<const double> row(ns.mu.data() + a * child_space, child_space);
      const std::size_t best = argmax_lowest(row);
      ns.best_children[a] = best;
      ns.mu_star[a] = row[best];
    }

    const double top = *std::max_element(ns.mu_star.begin(), ns.mu_star.end());
    ns.tau_star.resize(k);
    for (std::size_t b = 0; b < k; ++b) ns.tau_star[b] = top - ns.mu_star[b];
  }

  // Top-down: the root picks its own argmax, every other node plays the
  // arm its parent recommends.
  sol.profiles.resize(tree.size());
  sol.welfare_profile.assign(tree.size(), 0);
  sol.welfare_optimum = 0.0;
  for (const Node& n : tree.nodes()) {
    const NodeSolution& ns = sol.nodes[static_cast<std::size_t>(n.id)];
    SpneProfile& prof = sol.profiles[static_cast<std::size_t>(n.id)];
    if (!n.parent) {
      prof.action = static_cast<Arm>(argmax_lowest(ns.mu_star));
    } else {
      const SpneProfile& pp = sol.profiles[static_cast<std::size_t>(*n.parent)];
      const auto& siblings = tree.node(*n.parent).children;
      const auto pos = std::find(siblings.begin(), siblings.end(), n.id) - siblings.begin();
      prof.action = pp.recommendations[static_cast<std::size_t>(pos)];
    }
    const int nch = static_cast<int>(n.children.size());
    const auto rec = decode_joint(ns.best_children[static_cast<std::size_t>(prof.action)],
                                  env.arms(), nch);
    prof.recommendations = rec;
    prof.transfers.clear();
    for (int i = 0; i < nch; ++i) {
      const NodeId w = n.children[static_cast<std::size_t>(i)];
      prof.transfers.push_back(
          sol.nodes[static_cast<std::size_t>(w)].tau_star[static_cast<std::size_t>(rec[static_cast<std::size_t>(i)])]);
    }
    sol.welfare_profile[static_cast<std::size_t>(n.id)] = prof.action;
    sol.welfare_optimum += *std::max_element(ns.mu_star.begin(), ns.mu_star.end());
  }
  return sol;
}

const SpneProfile& spne_profile(const OracleSolution& sol, NodeId v) {
  return sol.profiles.at(static_cast<std::size_t>(v));
}

double profile_welfare(const Environment& env, std::span<const Arm> profile) {
  double total = 0.0;
  std::vector<Arm> joint;
  for (const Node& n : env.tree().nodes()) {
    joint.clear();
    joint.push_back(profile[static_cast<std::size_t>(n.id)]);
    for (NodeId c : n.children) joint.push_back(profile[static_cast<std::size_t>(c)]);
    total += env.theta(n.id, joint);
  }
  return total;
}

WelfareOptimum brute_force_welfare(const Environment& env, std::size_t cap) {
  const std::size_t n = env.tree().size();
  const std::size_t k = static_cast<std::size_t>(env.arms());
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > cap / k) {
      throw EnumerationTooLarge("K^|V| exceeds the enumeration cap of " +
                                std::to_string(cap) + "; use solve_tree only");
    }
    total *= k;
  }

  std::vector<Arm> profile(n, 0);
  WelfareOptimum best{profile, -std::numeric_limits<double>::infinity()};
  // Odometer over profiles in lexicographic order (node 0 most significant);
  // strict improvement keeps the lexicographically smallest maximizer.
  for (std::size_t step = 0; step < total; ++step) {
    const double value = profile_welfare(env, profile);
    if (value > best.value) {
      best.value = value;
      best.profile = profile;
    }
    for (std::size_t pos = n; pos-- > 0;) {
      if (++profile[pos] < env.arms()) break;
      profile[pos] = 0;
    }
  }
  return best;
}

std::vector<NodeGaps> reward_gaps(const Environment& env, const OracleSolution& sol) {
  const Tree& tree = env.tree();
  const std::size_t k = static_cast<std::size_t>(env.arms());
  std::vector<NodeGaps> out(tree.size());
  for (const Node& n : tree.nodes()) {
    NodeGaps& g = out[static_cast<std::size_t>(n.id)];
    const NodeSolution& ns = sol.node(n.id);
    const SpneProfile& prof = spne_profile(sol, n.id);
    const int nch = static_cast<int>(n.children.size());
    const std::size_t child_space = int_pow(k, nch);
    const auto& theta = env.theta_table(n.id);

    const double top = *std::max_element(ns.mu_star.begin(), ns.mu_star.end());
    g.action_singleton = std::count(ns.mu_star.begin(), ns.mu_star.end(), top) == 1;

    const std::size_t a_star = static_cast<std::size_t>(prof.action);
    const std::size_t best_c = ns.best_children[a_star];
    const double best_mu = ns.mu[a_star * child_space + best_c];
    g.recommendation_singleton = true;
    for (std::size_t c = 0; c < child_space; ++c) {
      if (c != best_c && ns.mu[a_star * child_space + c] == best_mu) {
        g.recommendation_singleton = false;
      }
    }

    for (int i = 0; i < nch; ++i) {
      const std::size_t place = int_pow(k, nch - 1 - i);
      const std::size_t cur = (best_c / place) % k;
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < k; ++b) {
        if (b == cur) continue;
        const std::size_t alt = best_c - cur * place + b * place;
        gap = std::min(gap, best_mu - ns.mu[a_star * child_space + alt]);
      }
      g.child_gaps.push_back(gap);
    }

    // Leaves: gap between the two best own arms. Inner nodes: for each own
    // arm, gap between the two best child parts of theta; min over arms.
    auto top_two_gap = [](std::span<const double> row) {
      double first = -std::numeric_limits<double>::infinity();
      double second = -std::numeric_limits<double>::infinity();
      for (double x : row) {
        if (x > first) {
          second = first;
          first = x;
        } else if (x > second) {
          second = x;
        }
      }
      return first - second;
    };
    if (nch == 0) {
      g.theta_gap = top_two_gap(theta);
    } else {
      g.theta_gap = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < k; ++a) {
        g.theta_gap = std::min(
            g.theta_gap, top_two_gap(std::span<const double>(theta.data() + a * child_space,
                                                             child_space)));
      }
    }
  }
  return out;
}

}  // namespace mailsim
