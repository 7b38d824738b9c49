#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mailsim/environment.hpp"
#include "mailsim/serialize.hpp"
#include "support/generators.hpp"

namespace mailsim {
namespace {

TEST(Tree, NodeCountsMatchClosedForm) {
  EXPECT_EQ(build_tree(3, 2).size(), 7u);
  EXPECT_EQ(build_tree(3, 3).size(), 13u);
  EXPECT_EQ(build_tree(4, 1).size(), 4u);
  EXPECT_EQ(build_tree(1, 5).size(), 1u);
  for (int d = 1; d <= 4; ++d) {
    for (int b = 1; b <= 3; ++b) EXPECT_EQ(build_tree(d, b).size(), expected_node_count(d, b));
  }
}

TEST(Tree, BreadthFirstLayout) {
  const Tree t = build_tree(3, 2);
  EXPECT_EQ(t.root(), 0);
  EXPECT_EQ(t.node(0).depth, 3);
  EXPECT_FALSE(t.node(0).parent.has_value());
  EXPECT_EQ(t.node(0).children, (std::vector<NodeId>{1, 2}));
  EXPECT_EQ(t.node(2).children, (std::vector<NodeId>{5, 6}));
  for (const Node& n : t.nodes()) {
    if (n.parent) {
      EXPECT_LT(*n.parent, n.id);
      EXPECT_EQ(t.node(*n.parent).depth, n.depth + 1);
    }
    EXPECT_EQ(n.is_leaf(), n.depth == 1);
  }
  EXPECT_EQ(t.nodes_at_depth(1), (std::vector<NodeId>{3, 4, 5, 6}));
}

TEST(Tree, RejectsBrokenNodeLists) {
  std::vector<Node> nodes = build_tree(2, 2).nodes();
  nodes[1].depth = 2;
  EXPECT_THROW(Tree(2, 2, nodes), std::invalid_argument);
  nodes = build_tree(2, 2).nodes();
  nodes.pop_back();
  EXPECT_THROW(Tree(2, 2, nodes), std::invalid_argument);
  EXPECT_THROW(build_tree(0, 2), std::invalid_argument);
}

TEST(JointEncoding, OwnArmIsMostSignificant) {
  const std::vector<Arm> joint{1, 0, 2};
  EXPECT_EQ(encode_joint(joint, 3), 1u * 9 + 0u * 3 + 2u);
  EXPECT_EQ(decode_joint(11, 3, 3), joint);
  EXPECT_EQ(own_arm_of(11, 3, 3), 1);
  const std::vector<Arm> bad{0, 3};
  EXPECT_THROW(encode_joint(bad, 3), std::out_of_range);
}

TEST(JointEncoding, RoundTripsEveryIndex) {
  for (int k = 2; k <= 4; ++k) {
    for (int arity = 1; arity <= 3; ++arity) {
      const std::size_t n = int_pow(static_cast<std::size_t>(k), arity);
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_EQ(encode_joint(decode_joint(i, k, arity), k), i);
      }
    }
  }
}

TEST(Environment, ValidatesTables) {
  const Tree tree = build_tree(2, 1);
  EXPECT_THROW(Environment(tree, 1, NoiseModel::none(), {{0.1}, {0.2}}), std::invalid_argument);
  EXPECT_THROW(Environment(tree, 2, NoiseModel::none(), {{0.1, 0.2, 0.3}, {0.1, 0.2}}),
               std::invalid_argument);
  EXPECT_THROW(Environment(tree, 2, NoiseModel::none(), {{0.1, 0.2, 0.3, 1.5}, {0.1, 0.2}}),
               std::invalid_argument);
  EXPECT_THROW(Environment(tree, 2, NoiseModel::gaussian(-1.0), {{0, 0, 0, 0}, {0, 0}}),
               std::invalid_argument);
}

TEST(Environment, ThetaLookup) {
  const Environment env = testing::chain_environment();
  const std::vector<Arm> j{0, 1};
  EXPECT_DOUBLE_EQ(env.theta(0, j), 0.8);
  EXPECT_DOUBLE_EQ(env.theta(0, 2), 0.1);
  EXPECT_EQ(env.arity(0), 2);
  EXPECT_EQ(env.arity(1), 1);
  EXPECT_EQ(env.joint_count(0), 4u);
}

TEST(Environment, SampledEntriesInUnitInterval) {
  const Environment env = testing::random_environment(7, {3, 2, 3});
  for (const Node& n : env.tree().nodes()) {
    EXPECT_EQ(env.joint_count(n.id), int_pow(3, env.arity(n.id)));
    for (double x : env.theta_table(n.id)) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

TEST(Noise, NoneIsExact) {
  const Environment env = testing::single_leaf({0.3, 0.7});
  RngStream rng(1);
  EXPECT_DOUBLE_EQ(draw_reward(env, 0, 1, rng), 0.7);
}

TEST(Noise, BernoulliCenteredRealizesZeroOrOne) {
  const Environment env = testing::single_leaf({0.3, 0.7}, NoiseModel::bernoulli_centered());
  RngStream rng(5);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = draw_reward(env, 0, 1, rng);
    EXPECT_TRUE(x == 0.0 || x == 1.0);
    sum += x;
  }
  EXPECT_NEAR(sum / n, 0.7, 0.02);
}

TEST(Noise, GaussianHasRequestedSpread) {
  const Environment env = testing::single_leaf({0.5, 0.5}, NoiseModel::gaussian(0.1));
  RngStream rng(9);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = draw_reward(env, 0, 0, rng) - 0.5;
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.005);
  EXPECT_NEAR(std::sqrt(sq / n), 0.1, 0.005);
}

TEST(Noise, KindNamesRoundTrip) {
  for (NoiseKind k : {NoiseKind::kGaussian, NoiseKind::kBernoulliCentered, NoiseKind::kNone}) {
    EXPECT_EQ(noise_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(noise_kind_from_string("laplace"), std::invalid_argument);
}

TEST(Rng, StreamsAreDeterministicAndDistinct) {
  RngStream a = make_stream(42, 3, StreamPurpose::kNoise);
  RngStream b = make_stream(42, 3, StreamPurpose::kNoise);
  RngStream c = make_stream(42, 3, StreamPurpose::kPolicy);
  RngStream d = make_stream(42, 4, StreamPurpose::kNoise);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
  RngStream e(0);
  for (int i = 0; i < 1000; ++i) {
    const int u = uniform_index(e, 3);
    EXPECT_GE(u, 0);
    EXPECT_LT(u, 3);
  }
}

TEST(Serialize, EnvironmentRoundTrip) {
  const Environment env = testing::random_environment(11, {3, 2, 3});
  const nlohmann::json j = environment_to_json(env, 11);
  EXPECT_EQ(j.at("seed").get<std::uint64_t>(), 11u);
  const Environment back = environment_from_json(nlohmann::json::parse(j.dump()));
  ASSERT_EQ(back.tree().size(), env.tree().size());
  EXPECT_EQ(back.arms(), env.arms());
  EXPECT_EQ(back.noise().kind, env.noise().kind);
  for (const Node& n : env.tree().nodes()) {
    EXPECT_EQ(back.theta_table(n.id), env.theta_table(n.id));
    EXPECT_EQ(back.tree().node(n.id).children, n.children);
  }
}

TEST(Serialize, RejectsForeignFormat) {
  EXPECT_THROW(environment_from_json(nlohmann::json{{"format", "other"}}),
               std::invalid_argument);
}

}  // namespace
}  // namespace mailsim
