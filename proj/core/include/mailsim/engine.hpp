#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "mailsim/ledger.hpp"
#include "mailsim/player.hpp"
#include "mailsim/schedule.hpp"

namespace mailsim {

struct GameOptions {
  long long horizon = 0;
  ConstantMode mode;
  std::uint64_t master_seed = 0;
  // Rounds at which the ledger is snapshotted; empty means checkpoint_grid().
  std::vector<long long> checkpoints;
  // Nodes played by an exact best responder instead of the learning policy.
  std::vector<NodeId> scripted;
  // Optional per-round trace, one line per node per round.
  std::ostream* trace = nullptr;
};

// Every round below dense_until, then `count` geometrically spaced rounds
// up to T, plus T/4, T/2 and T.
std::vector<long long> checkpoint_grid(long long horizon, long long dense_until = 1000,
                                       int count = 100);

struct LedgerSnapshot {
  long long t = 0;
  std::vector<NodeRegret> nodes;
  std::vector<double> w1;
  double welfare = 0.0;
};

struct RunDiagnostics {
  double max_conservation_error = 0.0;  // max_t |sum u - sum X|
  long long conservation_violations = 0;
  long long decomposition_violations = 0;  // node-rounds
  long long negative_welfare_increments = 0;
};

inline constexpr double kConservationTolerance = 1e-12;

class Game {
 public:
  Game(const Environment& env, const OracleSolution& sol, const GameOptions& options);

  // Plays round t + 1: top-down decisions, reward draws, settlement,
  // observations and regret accounting.
  const RoundRecord& step();

  long long t() const { return t_; }
  const GamePlan& plan() const { return plan_; }
  const RegretLedger& ledger() const { return ledger_; }
  const RunDiagnostics& diagnostics() const { return diagnostics_; }
  const RoundRecord& last_round() const { return record_; }
  const Policy& policy(NodeId v) const { return *policies_.at(static_cast<std::size_t>(v)); }
  // Null for scripted nodes.
  const MailPlayer* mail_player(NodeId v) const;
  LedgerSnapshot snapshot() const;

 private:
  void write_trace() const;

  const Environment& env_;
  const OracleSolution& sol_;
  GameOptions options_;
  GamePlan plan_;
  std::vector<std::unique_ptr<Policy>> policies_;
  std::vector<RngStream> noise_;
  std::vector<std::size_t> child_position_;
  RegretLedger ledger_;
  RoundRecord record_;
  RunDiagnostics diagnostics_;
  long long t_ = 0;
};

struct GameResult {
  GamePlan plan;
  std::vector<LedgerSnapshot> series;
  RunDiagnostics diagnostics;
};

GameResult run_game(const Environment& env, const OracleSolution& sol,
                    const GameOptions& options);

}  // namespace mailsim
