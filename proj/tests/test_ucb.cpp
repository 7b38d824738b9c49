#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mailsim/ucb.hpp"

namespace mailsim {
namespace {

TEST(UcbSelect, SweepsInIndexOrder) {
  UcbStats stats(3, 2, 1000);
  EXPECT_EQ(stats.size(), 9u);
  EXPECT_EQ(ucb_select(stats, std::nullopt, 0), 0u);
  for (long long s = 0; s < 9; ++s) {
    EXPECT_EQ(ucb_select(stats, Contract{2, 5.0}, s), static_cast<std::size_t>(s));
  }
  EXPECT_THROW(ucb_select(stats, std::nullopt, -1), std::invalid_argument);
}

TEST(UcbSelect, UnpulledArmAfterSweepComesFirst) {
  UcbStats stats(2, 2, 1000);
  for (std::size_t j = 0; j < 4; ++j) {
    if (j != 2) stats.record(j, 1.0);
  }
  EXPECT_EQ(ucb_select(stats, std::nullopt, 10), 2u);
}

TEST(UcbSelect, ParentTransferBreaksTies) {
  UcbStats stats(2, 2, 1000);
  for (std::size_t j = 0; j < 4; ++j) stats.record(j, 0.5);
  const std::size_t j = ucb_select(stats, Contract{1, 0.3}, 4);
  EXPECT_EQ(own_arm_of(j, 2, 2), 1);
  EXPECT_EQ(ucb_select(stats, std::nullopt, 4), 0u);
}

TEST(UcbSelect, BonusArithmetic) {
  UcbStats stats(2, 1, 10'000);
  EXPECT_DOUBLE_EQ(stats.log_term(), std::log(2.0e12));
  for (int i = 0; i < 10; ++i) {
    stats.record(0, 0.5);
    stats.record(1, 0.1);
  }
  const double bonus = 2.0 * std::sqrt(std::log(2.0e12) / 10.0);
  EXPECT_NEAR(bonus, 3.366, 1e-3);
  EXPECT_EQ(ucb_select(stats, std::nullopt, 2), 0u);
  // Arm 1 wins once its contract covers the 0.4 gap.
  EXPECT_EQ(ucb_select(stats, Contract{1, 0.41}, 2), 1u);
  EXPECT_EQ(ucb_select(stats, Contract{1, 0.39}, 2), 0u);
}

TEST(UcbUpdate, RunningMean) {
  UcbStats stats(2, 1, 100);
  for (int i = 0; i < 3; ++i) stats.record(1, 0.2);
  ucb_update(stats, 1, true, 0.6);
  EXPECT_EQ(stats.count(1), 4);
  EXPECT_NEAR(stats.mean(1), 0.3, 1e-15);
}

TEST(UcbUpdate, NonCompliantRoundIsDiscarded) {
  UcbStats stats(2, 2, 100);
  stats.record(1, 0.2);
  const UcbStats before = stats;
  ucb_update(stats, 1, false, 0.9);
  for (std::size_t j = 0; j < stats.size(); ++j) {
    EXPECT_EQ(stats.count(j), before.count(j));
    EXPECT_EQ(stats.mean(j), before.mean(j));
  }
}

// Builds stats whose arm perm[j] carries the samples of arm j.
UcbStats relabeled(const std::vector<std::vector<double>>& samples,
                   const std::vector<std::size_t>& perm, int arms, int arity) {
  UcbStats s(arms, arity, 5000);
  for (std::size_t j = 0; j < samples.size(); ++j) {
    for (double x : samples[j]) s.record(perm[j], x);
  }
  return s;
}

// Property: relabeling joint arms relabels the choice.
TEST(UcbSelectProperty, PermutationInvariance) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pulls(1, 30);
  for (int trial = 0; trial < 300; ++trial) {
    const int arms = 2 + trial % 2;
    const int arity = 1 + trial % 3;
    const std::size_t n = int_pow(static_cast<std::size_t>(arms), arity);
    std::vector<std::vector<double>> samples(n);
    for (auto& v : samples) {
      const int m = pulls(rng);
      for (int i = 0; i < m; ++i) v.push_back(unit(rng));
    }
    std::vector<std::size_t> id(n);
    std::iota(id.begin(), id.end(), 0);

    std::vector<std::size_t> any = id;
    std::shuffle(any.begin(), any.end(), rng);
    const UcbStats base = relabeled(samples, id, arms, arity);
    const UcbStats moved = relabeled(samples, any, arms, arity);
    EXPECT_EQ(ucb_select(moved, std::nullopt, static_cast<long long>(n)),
              any[ucb_select(base, std::nullopt, static_cast<long long>(n))]);

    // With a parent contract only relabelings inside each own-arm block apply.
    std::vector<std::size_t> block = id;
    const std::size_t per_own = n / static_cast<std::size_t>(arms);
    for (int a = 0; a < arms; ++a) {
      std::shuffle(block.begin() + a * static_cast<long>(per_own),
                   block.begin() + (a + 1) * static_cast<long>(per_own), rng);
    }
    const UcbStats blocked = relabeled(samples, block, arms, arity);
    const Contract c{static_cast<Arm>(trial % arms), unit(rng)};
    EXPECT_EQ(ucb_select(blocked, c, static_cast<long long>(n)),
              block[ucb_select(base, c, static_cast<long long>(n))]);
  }
}

}  // namespace
}  // namespace mailsim
