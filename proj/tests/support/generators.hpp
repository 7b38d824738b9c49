#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mailsim/environment.hpp"
#include "mailsim/rng.hpp"

namespace mailsim::testing {

struct Shape {
  int depth;
  int breadth;
  int arms;
};

// Random tree shape with depth <= max_depth, breadth <= max_breadth, arms <= max_arms.
inline Shape random_shape(std::mt19937_64& rng, int max_depth, int max_breadth, int max_arms) {
  std::uniform_int_distribution<int> d(1, max_depth);
  std::uniform_int_distribution<int> b(1, max_breadth);
  std::uniform_int_distribution<int> k(2, max_arms);
  return {d(rng), b(rng), k(rng)};
}

inline Environment random_environment(std::uint64_t seed, const Shape& s,
                                      NoiseModel noise = NoiseModel::gaussian(0.1)) {
  RngStream rng = make_stream(seed, 0, StreamPurpose::kEnvironment);
  return sample_environment(build_tree(s.depth, s.breadth), s.arms, rng, noise);
}

// Theta tables drawn from a small grid so ties occur often.
inline Environment tied_environment(std::uint64_t seed, const Shape& s) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> level(0, 4);
  Tree tree = build_tree(s.depth, s.breadth);
  std::vector<std::vector<double>> theta;
  for (const Node& n : tree.nodes()) {
    std::vector<double> table(int_pow(static_cast<std::size_t>(s.arms),
                                      static_cast<int>(n.children.size()) + 1));
    for (double& x : table) x = level(rng) / 4.0;
    theta.push_back(std::move(table));
  }
  return Environment(std::move(tree), s.arms, NoiseModel::none(), std::move(theta));
}

// Root 0 with one leaf child 1, K = 2.
inline Environment chain_environment(NoiseModel noise = NoiseModel::none()) {
  return Environment(build_tree(2, 1), 2, noise, {{0.2, 0.8, 0.1, 0.6}, {0.9, 0.4}});
}

inline Environment single_leaf(std::vector<double> theta, NoiseModel noise = NoiseModel::none()) {
  const int arms = static_cast<int>(theta.size());
  return Environment(build_tree(1, 1), arms, noise, {std::move(theta)});
}

}  // namespace mailsim::testing
