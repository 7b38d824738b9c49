#include "mailsim/ucb.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mailsim {

UcbStats::UcbStats(int arms, int arity, long long horizon)
    : arms_(arms), arity_(arity) {
  if (arms < 2 || arity < 1 || horizon < 1) {
    throw std::invalid_argument("UcbStats: bad dimensions");
  }
  const std::size_t n = int_pow(static_cast<std::size_t>(arms), arity);
  const double t = static_cast<double>(horizon);
  log_term_ = std::log(static_cast<double>(n) * t * t * t);
  counts_.assign(n, 0);
  means_.assign(n, 0.0);
}

long long UcbStats::total_count() const {
  return std::accumulate(counts_.begin(), counts_.end(), 0LL);
}

void UcbStats::record(std::size_t joint, double reward) {
  long long& c = counts_.at(joint);
  double& m = means_[joint];
  ++c;
  m += (reward - m) / static_cast<double>(c);
}

std::size_t ucb_select(const UcbStats& stats, const std::optional<Contract>& parent,
                       long long phase_step) {
  if (phase_step < 0) throw std::invalid_argument("ucb_select: negative phase step");
  const std::size_t n = stats.size();
  if (static_cast<std::size_t>(phase_step) < n) {
    return static_cast<std::size_t>(phase_step);
  }
  const std::size_t per_own = n / static_cast<std::size_t>(stats.arms());
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const long long c = stats.count(j);
    if (c == 0) return j;
    double score = stats.mean(j) + 2.0 * std::sqrt(stats.log_term() / static_cast<double>(c));
    if (parent && static_cast<Arm>(j / per_own) == parent->arm) score += parent->transfer;
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

void ucb_update(UcbStats& stats, std::size_t joint, bool complied, double shifted_reward) {
  if (!complied) return;
  stats.record(joint, shifted_reward);
}

}  // namespace mailsim
