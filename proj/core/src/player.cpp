#include "mailsim/player.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mailsim {

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::kWait:
      return "wait";
    case Phase::kExplore:
      return "explore";
    case Phase::kCommit:
      return "commit";
  }
  return "unknown";
}

MailPlayer::MailPlayer(NodeId id, int arms, int num_children, int breadth, long long horizon,
                       const DepthPlan& plan, RngStream rng)
    : id_(id),
      arms_(arms),
      num_children_(num_children),
      breadth_(breadth),
      horizon_(horizon),
      plan_(plan),
      rng_(std::move(rng)),
      ucb_(arms, num_children + 1, horizon) {
  if ((num_children == 0) != !plan_.schedule.has_value()) {
    throw std::invalid_argument("MailPlayer: leaves take no schedule, inner nodes need one");
  }
  if (num_children > 0) {
    wait_recommendation_ = static_cast<Arm>(uniform_index(rng_, arms_));
    const double step = std::pow(static_cast<double>(horizon_), -plan_.schedule->beta);
    searches_.assign(static_cast<std::size_t>(num_children) * static_cast<std::size_t>(arms),
                     IncentiveSearch(step));
    estimates_.assign(searches_.size(), std::numeric_limits<double>::quiet_NaN());
  } else {
    estimates_ready_ = true;
  }
}

Phase MailPlayer::phase(long long t) const {
  if (t <= plan_.wait) return Phase::kWait;
  if (t < plan_.commit_start()) return Phase::kExplore;
  return Phase::kCommit;
}

const IncentiveSearch& MailPlayer::search(int child, Arm b) const {
  return searches_.at(slot(child, b));
}

double MailPlayer::estimate(int child, Arm b) const { return estimates_.at(slot(child, b)); }

MailPlayer::ExploreSlot MailPlayer::explore_slot(long long t) const {
  const long long len = plan_.schedule->batch_length;
  const long long per_arm = len * plan_.schedule->batch_count;
  const long long offset = t - plan_.wait - 1;
  const long long within = offset % per_arm;
  return ExploreSlot{static_cast<Arm>(offset / per_arm), static_cast<int>(within / len),
                     within % len};
}

Decision MailPlayer::decide(long long t, const std::optional<Contract>& received) {
  if (t < 1 || t > horizon_) throw std::logic_error("MailPlayer: round outside 1..T");
  Decision d;
  d.contracts.reserve(static_cast<std::size_t>(num_children_));
  switch (phase(t)) {
    case Phase::kWait:
      d.action = static_cast<Arm>(uniform_index(rng_, arms_));
      d.contracts.assign(static_cast<std::size_t>(num_children_),
                         Contract{wait_recommendation_, 0.0});
      break;
    case Phase::kExplore: {
      const ExploreSlot s = explore_slot(t);
      d.action = static_cast<Arm>(uniform_index(rng_, arms_));
      for (int w = 0; w < num_children_; ++w) {
        d.contracts.push_back(Contract{s.arm, searches_[slot(w, s.arm)].offer()});
      }
      break;
    }
    case Phase::kCommit: {
      const long long phase_step = t - plan_.commit_start();
      last_joint_ = ucb_select(ucb_, received, phase_step);
      const auto joint = decode_joint(last_joint_, arms_, num_children_ + 1);
      d.action = joint[0];
      for (int w = 0; w < num_children_; ++w) {
        const Arm b = joint[static_cast<std::size_t>(w) + 1];
        d.contracts.push_back(Contract{b, estimates_[slot(w, b)]});
      }
      break;
    }
  }
  last_contracts_ = d.contracts;
  return d;
}

void MailPlayer::observe(long long t, std::span<const Arm> child_actions, double reward) {
  if (static_cast<int>(child_actions.size()) != num_children_) {
    throw std::invalid_argument("MailPlayer::observe: wrong number of child actions");
  }
  switch (phase(t)) {
    case Phase::kWait:
      return;
    case Phase::kExplore: {
      const ExploreSlot s = explore_slot(t);
      const ScheduleParams& sched = *plan_.schedule;
      for (int w = 0; w < num_children_; ++w) {
        searches_[slot(w, s.arm)].record(child_actions[static_cast<std::size_t>(w)] == s.arm);
      }
      if (s.position + 1 < sched.batch_length) return;
      for (int w = 0; w < num_children_; ++w) {
        searches_[slot(w, s.arm)].close_batch(sched.batch_length, plan_.search_constant,
                                              plan_.children.kappa, sched.beta_over_alpha());
      }
      if (s.batch + 1 < sched.batch_count) return;
      for (int w = 0; w < num_children_; ++w) {
        IncentiveSearch& search = searches_[slot(w, s.arm)];
        search.finish();
        estimates_[slot(w, s.arm)] =
            finalize_incentive(search.high(), horizon_, sched.beta, plan_.search_constant,
                               breadth_, sched.eta);
      }
      if (s.arm + 1 == arms_) estimates_ready_ = true;
      return;
    }
    case Phase::kCommit: {
      bool complied = true;
      double paid = 0.0;
      for (int w = 0; w < num_children_; ++w) {
        const Contract& c = last_contracts_[static_cast<std::size_t>(w)];
        complied = complied && child_actions[static_cast<std::size_t>(w)] == c.arm;
        paid += c.transfer;
      }
      ucb_update(ucb_, last_joint_, complied, reward - paid);
      return;
    }
  }
}

OracleResponder::OracleResponder(const Environment& env, const OracleSolution& sol, NodeId id)
    : arms_(env.arms()),
      mu_star_(sol.node(id).mu_star),
      best_children_(sol.node(id).best_children) {
  for (NodeId c : env.tree().node(id).children) {
    child_tau_star_.push_back(sol.node(c).tau_star);
  }
}

Decision OracleResponder::decide(long long, const std::optional<Contract>& received) {
  Decision d;
  d.action = best_response(mu_star_, received);
  const int nch = static_cast<int>(child_tau_star_.size());
  const auto rec = decode_joint(best_children_[static_cast<std::size_t>(d.action)], arms_, nch);
  for (int w = 0; w < nch; ++w) {
    const Arm b = rec[static_cast<std::size_t>(w)];
    d.contracts.push_back(
        Contract{b, child_tau_star_[static_cast<std::size_t>(w)][static_cast<std::size_t>(b)]});
  }
  return d;
}

}  // namespace mailsim
