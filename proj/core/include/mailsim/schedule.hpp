#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mailsim {

// Depth-indexed exponents of the payment-exploration schedule. Leaves have
// none: they run the bandit subroutine from the first round.
struct ScheduleParams {
  int depth = 2;
  double eta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  long long batch_length = 1;  // T_exp
  int batch_count = 1;         // Lambda_max, base-2 logarithm

  double beta_over_alpha() const { return beta / alpha; }
};

// Wait time, constant, regret exponent and confidence exponent a player
// guarantees on its action regret.
struct AssumptionParams {
  long long wait = 0;
  double constant = 0.0;
  double kappa = 0.5;
  double zeta = 2.0;
};

struct ConstantMode {
  enum class Kind { kTheoretical, kScaled };
  Kind kind = Kind::kTheoretical;
  // Scaled mode replaces every search constant c by c_scale and multiplies
  // every batch length by batch_scale.
  double c_scale = 0.05;
  double batch_scale = 1.0;

  static ConstantMode theoretical() { return {}; }
  static ConstantMode scaled(double c_scale, double batch_scale) {
    return {Kind::kScaled, c_scale, batch_scale};
  }
  bool is_scaled() const { return kind == Kind::kScaled; }
};

std::string to_string(ConstantMode::Kind kind);

// ceil() that snaps values within rounding noise of an integer.
long long stable_ceil(double x);

// kappa_{d-1} of the layer below depth d: 1/2 for leaves, 1 - 1/(2(d-1)) above.
double layer_kappa(int depth);

ScheduleParams schedule_params(int depth, int tree_depth, long long horizon,
                               double batch_scale = 1.0);

AssumptionParams leaf_params(int arms, long long horizon);

// Children aggregate by (max wait, max c, max kappa, min zeta).
AssumptionParams aggregate_children(std::span<const AssumptionParams> children);

AssumptionParams propagate_params(std::span<const AssumptionParams> children,
                                  const ScheduleParams& sched, int arms, int breadth,
                                  long long horizon);

enum class BatchOutcome { kConverged, kChildAccepted, kChildRefused };

std::string to_string(BatchOutcome outcome);

double refusal_threshold(long long batch_length, double constant, double kappa,
                         double beta_over_alpha);

BatchOutcome classify_batch(long long refusals, long long batch_length, double constant,
                            double kappa, double beta_over_alpha);

double finalize_incentive(double high, long long horizon, double beta, double constant,
                          int breadth, double eta);

// Everything a player at one depth needs to run its phases.
struct DepthPlan {
  int depth = 1;
  std::optional<ScheduleParams> schedule;  // absent for leaves
  AssumptionParams children;               // aggregated; unused for leaves
  AssumptionParams own;
  double search_constant = 0.0;  // c used in classification and finalization
  long long wait = 0;            // lambda: last Wait round
  long long explore_length = 0;  // K * T_exp * Lambda_max
  long long commit_start() const { return wait + explore_length + 1; }
};

struct GamePlan {
  int tree_depth = 1;
  int breadth = 1;
  int arms = 2;
  long long horizon = 2;
  ConstantMode mode;
  std::vector<DepthPlan> depths;  // depths[d - 1]
  bool horizon_guardrail = false;  // log T >= D^2 log(4BK log T)
  std::vector<std::string> warnings;

  const DepthPlan& at_depth(int d) const { return depths.at(static_cast<std::size_t>(d - 1)); }
  // First Commit round of the root plus its initialization sweep.
  long long minimum_horizon() const;
};

GamePlan build_plan(int tree_depth, int breadth, int arms, long long horizon,
                    const ConstantMode& mode);

bool horizon_guardrail(int tree_depth, int breadth, int arms, long long horizon);

}  // namespace mailsim
