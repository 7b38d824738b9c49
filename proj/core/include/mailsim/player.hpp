#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mailsim/oracle.hpp"
#include "mailsim/schedule.hpp"
#include "mailsim/search.hpp"
#include "mailsim/ucb.hpp"

namespace mailsim {

enum class Phase { kWait, kExplore, kCommit };

std::string to_string(Phase phase);

struct Decision {
  Arm action = 0;
  std::vector<Contract> contracts;  // one per child, in child order
};

// One player's decision rule. decide() sees the parent's contract for the
// round; observe() gets the realized child actions and own reward.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Phase phase(long long t) const = 0;
  virtual Decision decide(long long t, const std::optional<Contract>& received) = 0;
  virtual void observe(long long t, std::span<const Arm> child_actions, double reward) = 0;
};

// Wait, then probe every child's optimal transfers with a batched binary
// search, then run UCB on the instance shifted by the estimated transfers.
class MailPlayer final : public Policy {
 public:
  MailPlayer(NodeId id, int arms, int num_children, int breadth, long long horizon,
             const DepthPlan& plan, RngStream rng);

  NodeId id() const { return id_; }
  int depth() const { return plan_.depth; }
  const DepthPlan& plan() const { return plan_; }
  long long explore_start() const { return plan_.wait + 1; }
  long long commit_start() const { return plan_.commit_start(); }

  Phase phase(long long t) const override;
  Decision decide(long long t, const std::optional<Contract>& received) override;
  void observe(long long t, std::span<const Arm> child_actions, double reward) override;

  Arm wait_recommendation() const { return wait_recommendation_; }
  const UcbStats& ucb() const { return ucb_; }
  const IncentiveSearch& search(int child, Arm b) const;
  // tau-hat_b(w); NaN until the search on arm b has finished.
  double estimate(int child, Arm b) const;
  bool estimates_ready() const { return estimates_ready_; }

 private:
  struct ExploreSlot {
    Arm arm;
    int batch;
    long long position;  // within the batch
  };
  ExploreSlot explore_slot(long long t) const;
  std::size_t slot(int child, Arm b) const {
    return static_cast<std::size_t>(child) * static_cast<std::size_t>(arms_) +
           static_cast<std::size_t>(b);
  }

  NodeId id_;
  int arms_;
  int num_children_;
  int breadth_;
  long long horizon_;
  DepthPlan plan_;
  RngStream rng_;
  Arm wait_recommendation_ = 0;
  std::vector<IncentiveSearch> searches_;
  std::vector<double> estimates_;
  bool estimates_ready_ = false;
  UcbStats ucb_;
  std::size_t last_joint_ = 0;
  std::vector<Contract> last_contracts_;
};

// Exact best responder from the oracle: accepts any contract at least as
// good as its best arm and issues the equilibrium contracts for the arm it
// plays. Used to script subtrees in tests and demos.
class OracleResponder final : public Policy {
 public:
  OracleResponder(const Environment& env, const OracleSolution& sol, NodeId id);

  Phase phase(long long) const override { return Phase::kCommit; }
  Decision decide(long long t, const std::optional<Contract>& received) override;
  void observe(long long, std::span<const Arm>, double) override {}

 private:
  int arms_;
  std::vector<double> mu_star_;
  std::vector<std::size_t> best_children_;
  std::vector<std::vector<double>> child_tau_star_;
};

}  // namespace mailsim
