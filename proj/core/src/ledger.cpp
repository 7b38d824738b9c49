#include "mailsim/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mailsim {

double settle_utility(const NodeRound& round) {
  double u = round.reward;
  if (round.accepted()) u += round.received->transfer;
  for (std::size_t w = 0; w < round.issued.size(); ++w) {
    if (round.complied[w]) u -= round.issued[w].transfer;
  }
  return u;
}

double RegretLedger::w1(NodeId v) const {
  return rounds_ == 0 ? 0.0 : node(v).distance_sum / static_cast<double>(rounds_);
}

double profile_distance(const SpneProfile& optimum, Arm action,
                        std::span<const Contract> issued) {
  if (issued.size() != optimum.recommendations.size()) {
    throw std::invalid_argument("profile_distance: child count mismatch");
  }
  double d = action != optimum.action ? 1.0 : 0.0;
  for (std::size_t w = 0; w < issued.size(); ++w) {
    if (issued[w].arm != optimum.recommendations[w]) {
      d += 1.0;
    } else {
      d += std::abs(issued[w].transfer - optimum.transfers[w]);
    }
  }
  return d;
}

void accumulate_regret(const Environment& env, const OracleSolution& sol,
                       const RoundRecord& record, RegretLedger& ledger) {
  const Tree& tree = env.tree();
  const std::size_t k = static_cast<std::size_t>(env.arms());
  for (const Node& n : tree.nodes()) {
    const NodeRound& r = record.nodes[static_cast<std::size_t>(n.id)];
    const NodeSolution& ns = sol.node(n.id);
    const std::size_t child_space = ns.mu.size() / k;

    // max_a { mu*(a) + 1{a = B} tau }
    double best = sol.best_utility(n.id);
    double bonus_played = 0.0;
    if (r.received) {
      best = std::max(best, ns.mu_star[static_cast<std::size_t>(r.received->arm)] +
                                r.received->transfer);
      if (r.accepted()) bonus_played = r.received->transfer;
    }

    std::size_t recommended = 0;
    std::size_t realized = 0;
    double paid = 0.0;
    double overpay = 0.0;
    for (std::size_t w = 0; w < n.children.size(); ++w) {
      const NodeId child = n.children[w];
      const Contract& c = r.issued[w];
      const Arm played = record.nodes[static_cast<std::size_t>(child)].action;
      recommended = recommended * k + static_cast<std::size_t>(c.arm);
      realized = realized * k + static_cast<std::size_t>(played);
      if (played == c.arm) paid += c.transfer;
      overpay += std::max(0.0, c.transfer - sol.node(child).tau_star[static_cast<std::size_t>(c.arm)]);
    }
    const std::size_t own = static_cast<std::size_t>(r.action) * child_space;
    const double theta_realized = env.theta(n.id, own + realized);
    const double theta_recommended = env.theta(n.id, own + recommended);

    NodeRegret& acc = ledger.node(n.id);
    acc.total += best - (theta_realized + bonus_played - paid);
    acc.action += best - (ns.mu[own + recommended] + bonus_played);
    acc.payment += overpay;
    acc.deviation += std::max(0.0, theta_recommended - theta_realized);
  }
}

void welfare_and_w1(const Environment& env, const OracleSolution& sol,
                    const RoundRecord& record, RegretLedger& ledger) {
  const Tree& tree = env.tree();
  const std::size_t k = static_cast<std::size_t>(env.arms());
  double realized_welfare = 0.0;
  for (const Node& n : tree.nodes()) {
    const NodeRound& r = record.nodes[static_cast<std::size_t>(n.id)];
    std::size_t joint = static_cast<std::size_t>(r.action);
    for (NodeId c : n.children) {
      joint = joint * k + static_cast<std::size_t>(record.nodes[static_cast<std::size_t>(c)].action);
    }
    realized_welfare += env.theta(n.id, joint);
    ledger.node(n.id).distance_sum += profile_distance(spne_profile(sol, n.id), r.action, r.issued);
  }
  ledger.add_welfare(sol.welfare_optimum - realized_welfare);
  ledger.count_round();
}

bool decomposition_holds(const NodeRegret& r) {
  const double rhs = r.action + r.payment + r.deviation;
  return r.total <= rhs + kDecompositionSlack * std::max(1.0, std::abs(rhs));
}

}  // namespace mailsim
