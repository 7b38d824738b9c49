#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mailsim/oracle.hpp"
#include "mailsim/ucb.hpp"

namespace mailsim {

struct NodeRound {
  std::optional<Contract> received;  // none for the root
  Arm action = 0;
  std::vector<Contract> issued;      // one per child
  std::vector<bool> complied;        // child played the recommended arm
  double reward = 0.0;
  double utility = 0.0;

  bool accepted() const { return received && received->arm == action; }
};

struct RoundRecord {
  long long t = 0;
  std::vector<NodeRound> nodes;  // indexed by node id
};

// u = X + received transfer if compliant - issued transfers to compliant children.
double settle_utility(const NodeRound& round);

// Cumulative sums for one node.
struct NodeRegret {
  double total = 0.0;
  double action = 0.0;
  double payment = 0.0;
  double deviation = 0.0;
  double distance_sum = 0.0;  // sum_t dist(x*, x_t)
};

class RegretLedger {
 public:
  explicit RegretLedger(std::size_t nodes) : nodes_(nodes) {}

  const NodeRegret& node(NodeId v) const { return nodes_.at(static_cast<std::size_t>(v)); }
  NodeRegret& node(NodeId v) { return nodes_.at(static_cast<std::size_t>(v)); }
  const std::vector<NodeRegret>& nodes() const { return nodes_; }
  double welfare() const { return welfare_; }
  long long rounds() const { return rounds_; }
  // Wasserstein-1 distance between the empirical outcome distribution and
  // the Dirac mass at x*: the running average of dist.
  double w1(NodeId v) const;

  void add_welfare(double increment) { welfare_ += increment; }
  void count_round() { ++rounds_; }

 private:
  std::vector<NodeRegret> nodes_;
  double welfare_ = 0.0;
  long long rounds_ = 0;
};

// dist(x*, x) = 1{a != a*} + sum_w [1{b^w != b*^w} + 1{b^w = b*^w} |tau^w - tau*^w|]
double profile_distance(const SpneProfile& optimum, Arm action,
                        std::span<const Contract> issued);

void accumulate_regret(const Environment& env, const OracleSolution& sol,
                       const RoundRecord& record, RegretLedger& ledger);

void welfare_and_w1(const Environment& env, const OracleSolution& sol,
                    const RoundRecord& record, RegretLedger& ledger);

// total <= action + payment + deviation, up to float accumulation error.
bool decomposition_holds(const NodeRegret& r);

inline constexpr double kDecompositionSlack = 1e-9;

}  // namespace mailsim
