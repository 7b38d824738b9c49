#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mailsim/schedule.hpp"
#include "mailsim/ucb.hpp"

namespace mailsim {

enum class SearchStatus { kPending, kActive, kConverged, kExhausted };

std::string to_string(SearchStatus status);

// Batched binary search for one (child, arm) optimal transfer. The interval
// starts at [0, 1]; each batch offers the midpoint and moves one end by the
// refusal count. A Converged batch freezes the interval and the midpoint.
class IncentiveSearch {
 public:
  // step is 1/T^beta, the slack added on every update.
  explicit IncentiveSearch(double step);

  double low() const { return low_; }
  double high() const { return high_; }
  double mid() const { return mid_; }
  double step() const { return step_; }
  SearchStatus status() const { return status_; }
  long long refusals() const { return refusals_; }
  int batches_closed() const { return batches_; }

  // Transfer to offer this round.
  double offer();
  void record(bool accepted);
  BatchOutcome close_batch(long long batch_length, double constant, double kappa,
                           double beta_over_alpha);
  // Marks the search done; the final high is whatever the interval holds.
  void finish();

 private:
  double step_;
  double low_ = 0.0;
  double high_ = 1.0;
  double mid_ = 0.5;
  long long refusals_ = 0;
  int batches_ = 0;
  SearchStatus status_ = SearchStatus::kPending;
};

// Fully rational response to a contract given the responder's mu* table:
// accept (b, tau) iff mu*(b) + tau >= max mu*, else the lowest argmax.
Arm best_response(std::span<const double> mu_star, const std::optional<Contract>& offer);

struct BatchTrace {
  int batch = 0;
  double low = 0.0;
  double mid = 0.0;
  double high = 0.0;
  long long refusals = 0;
  BatchOutcome outcome = BatchOutcome::kChildAccepted;
};

struct SearchRun {
  double tau_star = 0.0;
  std::vector<BatchTrace> batches;  // interval state after each batch
  double final_low = 0.0;
  double final_high = 0.0;
  double estimate = 0.0;
  bool bracket_held = true;   // tau* in [low, high] after every batch
  bool width_bound_held = true;
  bool sandwich_held = true;
};

struct SearchDemoParams {
  long long horizon = 1'000'000;
  double alpha = 2.0 / 3.0;
  double beta = 0.25;
  double eta = 0.25;
  double constant = 1.0;
  double kappa = 0.5;
  int breadth = 1;
};

// Runs every batch of the search against a two-arm exact best responder
// whose optimal transfer for the probed arm is tau_star.
SearchRun run_search_demo(double tau_star, const SearchDemoParams& params);

}  // namespace mailsim
