#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mailsim/oracle.hpp"
#include "mailsim/serialize.hpp"
#include "support/generators.hpp"

namespace mailsim {
namespace {

TEST(SolveTree, LeafOptimalTransfers) {
  const Environment env = testing::single_leaf({0.9, 0.4});
  const OracleSolution sol = solve_tree(env);
  EXPECT_DOUBLE_EQ(sol.node(0).tau_star[0], 0.0);
  EXPECT_DOUBLE_EQ(sol.node(0).tau_star[1], 0.5);
  EXPECT_EQ(sol.node(0).mu_star, (std::vector<double>{0.9, 0.4}));
}

TEST(SolveTree, ChainExample) {
  const Environment env = testing::chain_environment();
  const OracleSolution sol = solve_tree(env);
  const NodeSolution& v = sol.node(0);
  ASSERT_EQ(v.mu.size(), 4u);
  EXPECT_NEAR(v.mu[0], 0.2, 1e-12);
  EXPECT_NEAR(v.mu[1], 0.3, 1e-12);
  EXPECT_NEAR(v.mu[2], 0.1, 1e-12);
  EXPECT_NEAR(v.mu[3], 0.1, 1e-12);
  EXPECT_NEAR(v.mu_star[0], 0.3, 1e-12);
  EXPECT_NEAR(v.mu_star[1], 0.1, 1e-12);
  EXPECT_NEAR(sol.welfare_optimum, 1.2, 1e-12);
}

TEST(BruteForce, SingleLeaf) {
  const WelfareOptimum w = brute_force_welfare(testing::single_leaf({0.3, 0.7}));
  EXPECT_EQ(w.profile, (std::vector<Arm>{1}));
  EXPECT_DOUBLE_EQ(w.value, 0.7);
}

TEST(BruteForce, ChainExample) {
  const WelfareOptimum w = brute_force_welfare(testing::chain_environment());
  EXPECT_EQ(w.profile, (std::vector<Arm>{0, 1}));
  EXPECT_NEAR(w.value, 1.2, 1e-12);
}

TEST(BruteForce, RefusesLargeInstances) {
  const Environment env = testing::random_environment(1, {3, 3, 5});
  EXPECT_THROW(brute_force_welfare(env), EnumerationTooLarge);
  EXPECT_THROW(brute_force_welfare(testing::random_environment(1, {3, 2, 3}), 100),
               EnumerationTooLarge);
}

TEST(BruteForce, LexicographicTieBreak) {
  // Every profile has the same welfare.
  const Environment env(build_tree(2, 1), 2, NoiseModel::none(),
                        {{0.5, 0.5, 0.5, 0.5}, {0.5, 0.5}});
  EXPECT_EQ(brute_force_welfare(env).profile, (std::vector<Arm>{0, 0}));
}

TEST(SpneProfile, ChainExample) {
  const OracleSolution sol = solve_tree(testing::chain_environment());
  const SpneProfile& v = spne_profile(sol, 0);
  EXPECT_EQ(v.action, 0);
  EXPECT_EQ(v.recommendations, (std::vector<Arm>{1}));
  ASSERT_EQ(v.transfers.size(), 1u);
  EXPECT_NEAR(v.transfers[0], 0.5, 1e-12);
  const SpneProfile& w = spne_profile(sol, 1);
  EXPECT_EQ(w.action, 1);
  EXPECT_TRUE(w.recommendations.empty());
}

TEST(SpneProfile, SingleLeaf) {
  const OracleSolution sol = solve_tree(testing::single_leaf({0.3, 0.7}));
  EXPECT_EQ(spne_profile(sol, 0).action, 1);
  EXPECT_TRUE(spne_profile(sol, 0).transfers.empty());
}

// Fills each inner node's theta so that it peaks where every child plays its
// own mu*-argmax.
Environment aligned_environment(std::uint64_t seed, const testing::Shape& s) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Tree tree = build_tree(s.depth, s.breadth);
  std::vector<std::vector<double>> theta;
  for (const Node& n : tree.nodes()) {
    theta.emplace_back(int_pow(static_cast<std::size_t>(s.arms),
                               static_cast<int>(n.children.size()) + 1),
                       0.0);
  }
  for (const Node& n : tree.nodes()) {
    if (n.is_leaf()) {
      for (double& x : theta[static_cast<std::size_t>(n.id)]) x = unit(rng);
    }
  }
  for (int d = 2; d <= s.depth; ++d) {
    const OracleSolution partial =
        solve_tree(Environment(tree, s.arms, NoiseModel::none(), theta));
    for (NodeId v : tree.nodes_at_depth(d)) {
      const Node& n = tree.node(v);
      std::vector<Arm> best;
      for (NodeId c : n.children) {
        const auto& ms = partial.node(c).mu_star;
        best.push_back(static_cast<Arm>(std::max_element(ms.begin(), ms.end()) - ms.begin()));
      }
      std::vector<double> own(static_cast<std::size_t>(s.arms));
      for (double& x : own) x = unit(rng);
      auto& table = theta[static_cast<std::size_t>(v)];
      for (std::size_t i = 0; i < table.size(); ++i) {
        const auto joint = decode_joint(i, s.arms, static_cast<int>(n.children.size()) + 1);
        double hits = 0.0;
        for (std::size_t w = 0; w < best.size(); ++w) hits += joint[w + 1] == best[w];
        table[i] = 0.5 * own[static_cast<std::size_t>(joint[0])] + 0.5 * hits / best.size();
      }
    }
  }
  return Environment(std::move(tree), s.arms, NoiseModel::none(), std::move(theta));
}

TEST(SpneProfile, AlignedPreferencesNeedNoTransfers) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Environment env = aligned_environment(seed, {3, 2, 3});
    const OracleSolution sol = solve_tree(env);
    for (const Node& n : env.tree().nodes()) {
      for (double tau : spne_profile(sol, n.id).transfers) EXPECT_EQ(tau, 0.0);
    }
  }
}

TEST(RewardGaps, ChainExample) {
  const Environment env = testing::chain_environment();
  const auto gaps = reward_gaps(env, solve_tree(env));
  ASSERT_EQ(gaps[0].child_gaps.size(), 1u);
  EXPECT_NEAR(gaps[0].child_gaps[0], 0.1, 1e-12);
  EXPECT_TRUE(gaps[0].action_singleton);
  EXPECT_TRUE(gaps[0].recommendation_singleton);
}

TEST(RewardGaps, DuplicatedRowsBreakSingletons) {
  const Environment leaf = testing::single_leaf({0.5, 0.5});
  EXPECT_FALSE(reward_gaps(leaf, solve_tree(leaf))[0].action_singleton);
  const Environment chain(build_tree(2, 1), 2, NoiseModel::none(),
                          {{0.5, 0.5, 0.1, 0.2}, {0.6, 0.6}});
  const auto gaps = reward_gaps(chain, solve_tree(chain));
  EXPECT_FALSE(gaps[0].recommendation_singleton);
  EXPECT_EQ(gaps[0].child_gaps[0], 0.0);
}

TEST(RewardGaps, LeafUsesOwnArms) {
  const Environment leaf = testing::single_leaf({0.3, 0.7});
  const auto gaps = reward_gaps(leaf, solve_tree(leaf));
  EXPECT_TRUE(gaps[0].child_gaps.empty());
  EXPECT_NEAR(gaps[0].theta_gap, 0.4, 1e-12);
}

// Property: backward induction welfare equals exhaustive search.
TEST(OracleProperty, WelfareIdentityOnRandomInstances) {
  std::mt19937_64 gen(2024);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const testing::Shape s = testing::random_shape(gen, 3, 2, 3);
    const Environment env = testing::random_environment(seed, s);
    const OracleSolution sol = solve_tree(env);
    const WelfareOptimum bf = brute_force_welfare(env);
    EXPECT_NEAR(sol.welfare_optimum, bf.value, 1e-9) << "seed " << seed;
    EXPECT_EQ(sol.welfare_profile, bf.profile) << "seed " << seed;
    EXPECT_NEAR(profile_welfare(env, sol.welfare_profile), sol.welfare_optimum, 1e-9);
  }
}

TEST(OracleProperty, WelfareIdentityWithTies) {
  std::mt19937_64 gen(77);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const testing::Shape s = testing::random_shape(gen, 3, 2, 3);
    const Environment env = testing::tied_environment(seed, s);
    const OracleSolution sol = solve_tree(env);
    EXPECT_NEAR(sol.welfare_optimum, brute_force_welfare(env).value, 1e-9) << "seed " << seed;
    EXPECT_NEAR(profile_welfare(env, sol.welfare_profile), sol.welfare_optimum, 1e-9);
  }
}

TEST(OracleProperty, TransfersNonnegativeAndAttainZero) {
  std::mt19937_64 gen(5);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const testing::Shape s = testing::random_shape(gen, 3, 2, 3);
    const Environment env = testing::random_environment(seed, s);
    const OracleSolution sol = solve_tree(env);
    for (const Node& n : env.tree().nodes()) {
      const auto& tau = sol.node(n.id).tau_star;
      EXPECT_GE(*std::min_element(tau.begin(), tau.end()), 0.0);
      EXPECT_EQ(*std::min_element(tau.begin(), tau.end()), 0.0);
    }
  }
}

TEST(OracleProperty, MuBelowThetaWithEqualityAtFreeRecommendations) {
  std::mt19937_64 gen(6);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const testing::Shape s = testing::random_shape(gen, 3, 2, 3);
    const Environment env = testing::random_environment(seed, s);
    const OracleSolution sol = solve_tree(env);
    for (const Node& n : env.tree().nodes()) {
      const auto& mu = sol.node(n.id).mu;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        const auto joint = decode_joint(i, env.arms(), env.arity(n.id));
        bool all_free = true;
        for (std::size_t w = 0; w < n.children.size(); ++w) {
          const auto& tau = sol.node(n.children[w]).tau_star;
          all_free = all_free && tau[static_cast<std::size_t>(joint[w + 1])] == 0.0;
        }
        EXPECT_LE(mu[i], env.theta(n.id, i));
        EXPECT_EQ(mu[i] == env.theta(n.id, i), all_free);
      }
    }
  }
}

TEST(OracleProperty, ProfileInvariantToShiftingOneChild) {
  std::mt19937_64 gen(8);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const testing::Shape s{std::uniform_int_distribution<int>(2, 3)(gen),
                           std::uniform_int_distribution<int>(1, 2)(gen),
                           std::uniform_int_distribution<int>(2, 3)(gen)};
    const Environment base = testing::random_environment(seed, s);
    std::vector<std::vector<double>> lo;
    std::vector<std::vector<double>> hi;
    const NodeId shifted = 1;
    for (const Node& n : base.tree().nodes()) {
      lo.push_back(base.theta_table(n.id));
      if (n.id == shifted) {
        for (double& x : lo.back()) x *= 0.75;
      }
      hi.push_back(lo.back());
      if (n.id == shifted) {
        for (double& x : hi.back()) x += 0.25;
      }
    }
    const Environment a(base.tree(), s.arms, NoiseModel::none(), lo);
    const Environment b(base.tree(), s.arms, NoiseModel::none(), hi);
    const OracleSolution sa = solve_tree(a);
    const OracleSolution sb = solve_tree(b);
    for (const Node& n : base.tree().nodes()) {
      const SpneProfile& pa = spne_profile(sa, n.id);
      const SpneProfile& pb = spne_profile(sb, n.id);
      EXPECT_EQ(pa.action, pb.action) << "seed " << seed << " node " << n.id;
      EXPECT_EQ(pa.recommendations, pb.recommendations);
      for (std::size_t w = 0; w < pa.transfers.size(); ++w) {
        EXPECT_NEAR(pa.transfers[w], pb.transfers[w], 1e-12);
      }
    }
  }
}

TEST(OracleExport, ContainsEveryNode) {
  const Environment env = testing::random_environment(3, {3, 2, 3});
  const nlohmann::json j = oracle_to_json(env, solve_tree(env));
  EXPECT_EQ(j.at("format"), "mailsim-oracle");
  EXPECT_EQ(j.at("nodes").size(), 7u);
  EXPECT_EQ(j.at("nodes")[0].at("mu").size(), 27u);
}

}  // namespace
}  // namespace mailsim
