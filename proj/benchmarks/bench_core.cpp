#include <benchmark/benchmark.h>

#include "mailsim/engine.hpp"
#include "mailsim/environment.hpp"
#include "mailsim/oracle.hpp"
#include "mailsim/rng.hpp"
#include "mailsim/ucb.hpp"

namespace {

using namespace mailsim;

Environment make_env(int depth, int breadth, int arms) {
  RngStream rng = make_stream(1, 0, StreamPurpose::kEnvironment);
  return sample_environment(build_tree(depth, breadth), arms, rng);
}

void BM_SolveTree(benchmark::State& state) {
  const Environment env = make_env(static_cast<int>(state.range(0)),
                                   static_cast<int>(state.range(1)),
                                   static_cast<int>(state.range(2)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_tree(env));
}
BENCHMARK(BM_SolveTree)->Args({3, 2, 3})->Args({3, 3, 5})->Args({4, 2, 4});

void BM_UcbSelect(benchmark::State& state) {
  const int arms = static_cast<int>(state.range(0));
  const int arity = static_cast<int>(state.range(1));
  UcbStats stats(arms, arity, 1'000'000);
  RngStream rng = make_stream(1, 0, StreamPurpose::kPolicy);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t j = 0; j < stats.size(); ++j) {
    for (int i = 0; i < 10; ++i) stats.record(j, unit(rng));
  }
  const Contract c{1, 0.3};
  const auto steps = static_cast<long long>(stats.size());
  for (auto _ : state) benchmark::DoNotOptimize(ucb_select(stats, c, steps));
}
BENCHMARK(BM_UcbSelect)->Args({3, 3})->Args({5, 4});

void BM_GameStep(benchmark::State& state) {
  const Environment env = make_env(static_cast<int>(state.range(0)),
                                   static_cast<int>(state.range(1)),
                                   static_cast<int>(state.range(2)));
  const OracleSolution sol = solve_tree(env);
  GameOptions o;
  o.horizon = 1'000'000'000;
  o.mode = ConstantMode::scaled(0.05, 0.05);
  o.master_seed = 1;
  Game game(env, sol, o);
  for (auto _ : state) benchmark::DoNotOptimize(&game.step());
}
BENCHMARK(BM_GameStep)->Args({3, 2, 3})->Args({3, 3, 5});

}  // namespace

BENCHMARK_MAIN();
