#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mailsim/environment.hpp"

namespace mailsim {

// A recommended arm and the transfer paid iff the recipient plays it.
struct Contract {
  Arm arm = 0;
  double transfer = 0.0;
};

// UCB statistics over a joint-arm space A^{arity}, on rewards already net
// of the estimated transfers.
class UcbStats {
 public:
  UcbStats(int arms, int arity, long long horizon);

  int arms() const { return arms_; }
  int arity() const { return arity_; }
  std::size_t size() const { return counts_.size(); }
  long long count(std::size_t joint) const { return counts_[joint]; }
  double mean(std::size_t joint) const { return means_[joint]; }
  long long total_count() const;
  // log(|A^{arity}| * T^3), the numerator of the exploration bonus.
  double log_term() const { return log_term_; }

  void record(std::size_t joint, double reward);

 private:
  int arms_;
  int arity_;
  double log_term_;
  std::vector<long long> counts_;
  std::vector<double> means_;
};

// phase_step is 0 on the first round of the Commit phase. The first
// |A^{arity}| steps sweep the joint arms in index order; afterwards an arm
// with no recorded pull scores +inf and the rest score
// mean + 2 sqrt(log_term / count) + (parent transfer if own arm matches).
std::size_t ucb_select(const UcbStats& stats, const std::optional<Contract>& parent,
                       long long phase_step);

// Non-compliant rounds are discarded.
void ucb_update(UcbStats& stats, std::size_t joint, bool complied, double shifted_reward);

}  // namespace mailsim
