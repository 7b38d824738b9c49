#pragma once

#include <cstdint>
#include <random>

namespace mailsim {

using RngStream = std::mt19937_64;

// Each player owns one stream per purpose; streams never share state.
enum class StreamPurpose : std::uint64_t {
  kEnvironment = 1,
  kNoise = 2,
  kPolicy = 3,
  kSearchDemo = 4,
};

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic seed for the (master, player, purpose) triple.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t player,
                          StreamPurpose purpose);

RngStream make_stream(std::uint64_t master, std::uint64_t player,
                      StreamPurpose purpose);

// Uniform integer in [0, n).
int uniform_index(RngStream& rng, int n);

}  // namespace mailsim
