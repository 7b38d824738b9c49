#include "mailsim/search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mailsim {

std::string to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::kPending:
      return "pending";
    case SearchStatus::kActive:
      return "active";
    case SearchStatus::kConverged:
      return "converged";
    case SearchStatus::kExhausted:
      return "exhausted";
  }
  return "unknown";
}

IncentiveSearch::IncentiveSearch(double step) : step_(step) {
  if (!(step > 0.0)) throw std::invalid_argument("IncentiveSearch: step must be > 0");
}

double IncentiveSearch::offer() {
  if (status_ == SearchStatus::kPending) status_ = SearchStatus::kActive;
  return mid_;
}

void IncentiveSearch::record(bool accepted) {
  if (status_ != SearchStatus::kActive) return;
  if (!accepted) ++refusals_;
}

BatchOutcome IncentiveSearch::close_batch(long long batch_length, double constant,
                                          double kappa, double beta_over_alpha) {
  if (status_ == SearchStatus::kConverged) return BatchOutcome::kConverged;
  if (status_ != SearchStatus::kActive) {
    throw std::logic_error("IncentiveSearch: closing a batch that never started");
  }
  const BatchOutcome outcome =
      classify_batch(refusals_, batch_length, constant, kappa, beta_over_alpha);
  ++batches_;
  refusals_ = 0;
  switch (outcome) {
    case BatchOutcome::kConverged:
      status_ = SearchStatus::kConverged;
      return outcome;
    case BatchOutcome::kChildAccepted:
      high_ = mid_ + step_;
      break;
    case BatchOutcome::kChildRefused:
      low_ = mid_ - step_;
      break;
  }
  mid_ = 0.5 * (low_ + high_);
  return outcome;
}

void IncentiveSearch::finish() {
  if (status_ != SearchStatus::kConverged) status_ = SearchStatus::kExhausted;
}

Arm best_response(std::span<const double> mu_star, const std::optional<Contract>& offer) {
  const auto top_it = std::max_element(mu_star.begin(), mu_star.end());
  if (offer && mu_star[static_cast<std::size_t>(offer->arm)] + offer->transfer >= *top_it) {
    return offer->arm;
  }
  return static_cast<Arm>(top_it - mu_star.begin());
}

SearchRun run_search_demo(double tau_star, const SearchDemoParams& p) {
  if (!(tau_star >= 0.0 && tau_star <= 1.0)) {
    throw std::invalid_argument("run_search_demo: tau* must lie in [0, 1]");
  }
  const double t = static_cast<double>(p.horizon);
  const long long batch_length = std::max(1LL, stable_ceil(std::pow(t, p.alpha)));
  const int batch_count =
      static_cast<int>(std::max(1LL, stable_ceil(p.beta * std::log2(t))));
  const double step = std::pow(t, -p.beta);
  const double beta_over_alpha = p.beta / p.alpha;

  // Arm 0 is the responder's favourite; probing arm 1 needs exactly tau*.
  const std::vector<double> mu_star{tau_star, 0.0};
  const Arm probed = 1;

  SearchRun run;
  run.tau_star = tau_star;
  IncentiveSearch search(step);
  for (int batch = 0; batch < batch_count; ++batch) {
    long long refusals = 0;
    for (long long s = 0; s < batch_length; ++s) {
      const double offer = search.offer();
      const bool accepted = best_response(mu_star, Contract{probed, offer}) == probed;
      if (!accepted) ++refusals;
      search.record(accepted);
    }
    const BatchOutcome outcome =
        search.close_batch(batch_length, p.constant, p.kappa, beta_over_alpha);
    run.batches.push_back(
        BatchTrace{batch + 1, search.low(), search.mid(), search.high(), refusals, outcome});
    if (!(search.low() <= tau_star && tau_star <= search.high())) run.bracket_held = false;
    if (search.status() != SearchStatus::kConverged) {
      const double bound = std::ldexp(1.0, -(batch + 1)) + 2.0 * step;
      if (search.high() - search.low() > bound) run.width_bound_held = false;
    }
  }
  search.finish();
  run.final_low = search.low();
  run.final_high = search.high();
  run.estimate = finalize_incentive(search.high(), p.horizon, p.beta, p.constant, p.breadth,
                                    p.eta);
  const double extra = p.constant * p.breadth * std::pow(t, -p.eta);
  run.sandwich_held =
      run.estimate - 4.0 * step - extra <= tau_star && tau_star <= run.estimate;
  return run;
}

}  // namespace mailsim
