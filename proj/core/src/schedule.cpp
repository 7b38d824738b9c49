#include "mailsim/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mailsim/environment.hpp"

namespace mailsim {

std::string to_string(ConstantMode::Kind kind) {
  return kind == ConstantMode::Kind::kScaled ? "scaled" : "theoretical";
}

std::string to_string(BatchOutcome outcome) {
  switch (outcome) {
    case BatchOutcome::kConverged:
      return "converged";
    case BatchOutcome::kChildAccepted:
      return "accepted";
    case BatchOutcome::kChildRefused:
      return "refused";
  }
  return "unknown";
}

long long stable_ceil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<long long>(r);
  }
  return static_cast<long long>(std::ceil(x));
}

double layer_kappa(int depth) {
  if (depth <= 1) return 0.5;
  return 1.0 - 1.0 / (2.0 * depth);
}

ScheduleParams schedule_params(int depth, int tree_depth, long long horizon,
                               double batch_scale) {
  if (depth < 2) {
    throw std::invalid_argument("schedule_params: undefined for leaves (d = 1)");
  }
  if (depth > tree_depth) throw std::invalid_argument("schedule_params: d > D");
  if (horizon < 2) throw std::invalid_argument("schedule_params: T must be >= 2");
  if (!(batch_scale > 0.0)) throw std::invalid_argument("schedule_params: batch_scale <= 0");

  const double d = depth;
  const double big_d = tree_depth;
  ScheduleParams p;
  p.depth = depth;
  p.eta = 1.0 / (2.0 * d * (d - 1.0));
  p.alpha = (big_d + 1.0) * (d - 1.0) / (big_d * d);
  p.beta = 1.0 / (2.0 * d);

  const double t = static_cast<double>(horizon);
  p.batch_length = std::max(1LL, stable_ceil(batch_scale * std::pow(t, p.alpha)));
  p.batch_count = static_cast<int>(std::max(1LL, stable_ceil(p.beta * std::log2(t))));

  const double kappa_below = layer_kappa(depth - 1);
  if (!(p.beta_over_alpha() < 1.0 - kappa_below)) {
    throw std::logic_error("schedule_params: beta/alpha >= 1 - kappa at depth " +
                           std::to_string(depth));
  }
  return p;
}

AssumptionParams leaf_params(int arms, long long horizon) {
  const double k = arms;
  const double t = static_cast<double>(horizon);
  return AssumptionParams{0, 8.0 * std::sqrt(k * std::log(k * t * t * t)), 0.5, 2.0};
}

AssumptionParams aggregate_children(std::span<const AssumptionParams> children) {
  if (children.empty()) throw std::invalid_argument("aggregate_children: empty list");
  AssumptionParams agg = children.front();
  for (const auto& c : children.subspan(1)) {
    agg.wait = std::max(agg.wait, c.wait);
    agg.constant = std::max(agg.constant, c.constant);
    agg.kappa = std::max(agg.kappa, c.kappa);
    agg.zeta = std::min(agg.zeta, c.zeta);
  }
  return agg;
}

AssumptionParams propagate_params(std::span<const AssumptionParams> children,
                                  const ScheduleParams& sched, int arms, int breadth,
                                  long long horizon) {
  const AssumptionParams agg = aggregate_children(children);
  const double t = static_cast<double>(horizon);
  const double joint = std::pow(static_cast<double>(arms), breadth + 1);
  AssumptionParams out;
  out.wait = agg.wait + static_cast<long long>(arms) * sched.batch_length * sched.batch_count;
  out.constant = 10.0 * std::sqrt(joint * std::log(joint * t * t * t));
  out.kappa = std::max({0.5, agg.kappa + sched.eta, 1.0 - sched.beta});
  const double eps = std::log(4.0 * breadth * arms * std::log(t)) / std::log(t);
  out.zeta = sched.alpha * agg.zeta - eps;
  return out;
}

double refusal_threshold(long long batch_length, double constant, double kappa,
                         double beta_over_alpha) {
  return constant * std::pow(static_cast<double>(batch_length), kappa + beta_over_alpha);
}

BatchOutcome classify_batch(long long refusals, long long batch_length, double constant,
                            double kappa, double beta_over_alpha) {
  if (refusals < 0 || refusals > batch_length) {
    throw std::invalid_argument("classify_batch: refusals outside [0, T_exp]");
  }
  const double thr = refusal_threshold(batch_length, constant, kappa, beta_over_alpha);
  const double n = static_cast<double>(refusals);
  const double len = static_cast<double>(batch_length);
  if (thr < n && n < len - thr) return BatchOutcome::kConverged;
  if (n <= len - thr) return BatchOutcome::kChildAccepted;
  return BatchOutcome::kChildRefused;
}

double finalize_incentive(double high, long long horizon, double beta, double constant,
                          int breadth, double eta) {
  const double t = static_cast<double>(horizon);
  return high + std::pow(t, -beta) + constant * breadth * std::pow(t, -eta);
}

bool horizon_guardrail(int tree_depth, int breadth, int arms, long long horizon) {
  const double log_t = std::log(static_cast<double>(horizon));
  const double rhs = static_cast<double>(tree_depth) * tree_depth *
                     std::log(4.0 * breadth * arms * log_t);
  return log_t >= rhs;
}

long long GamePlan::minimum_horizon() const {
  const DepthPlan& root = at_depth(tree_depth);
  const int arity = tree_depth > 1 ? breadth + 1 : 1;
  return root.commit_start() - 1 +
         static_cast<long long>(int_pow(static_cast<std::size_t>(arms), arity));
}

GamePlan build_plan(int tree_depth, int breadth, int arms, long long horizon,
                    const ConstantMode& mode) {
  if (tree_depth < 1 || breadth < 1) throw std::invalid_argument("build_plan: bad tree shape");
  if (arms < 2) throw std::invalid_argument("build_plan: K must be >= 2");
  if (horizon < 2) throw std::invalid_argument("build_plan: T must be >= 2");
  if (mode.is_scaled() && !(mode.c_scale > 0.0)) {
    throw std::invalid_argument("build_plan: c_scale must be > 0 in scaled mode");
  }

  GamePlan plan;
  plan.tree_depth = tree_depth;
  plan.breadth = breadth;
  plan.arms = arms;
  plan.horizon = horizon;
  plan.mode = mode;
  plan.horizon_guardrail = horizon_guardrail(tree_depth, breadth, arms, horizon);

  DepthPlan leaf;
  leaf.depth = 1;
  leaf.own = leaf_params(arms, horizon);
  plan.depths.push_back(leaf);

  const double batch_scale = mode.is_scaled() ? mode.batch_scale : 1.0;
  for (int d = 2; d <= tree_depth; ++d) {
    DepthPlan dp;
    dp.depth = d;
    dp.schedule = schedule_params(d, tree_depth, horizon, batch_scale);
    // Every node at depth d has B children, all at depth d-1.
    const std::vector<AssumptionParams> kids(static_cast<std::size_t>(breadth),
                                             plan.depths.back().own);
    dp.children = aggregate_children(kids);
    dp.own = propagate_params(kids, *dp.schedule, arms, breadth, horizon);
    dp.search_constant = mode.is_scaled() ? mode.c_scale : dp.children.constant;
    dp.wait = dp.children.wait;
    dp.explore_length =
        static_cast<long long>(arms) * dp.schedule->batch_length * dp.schedule->batch_count;
    if (dp.own.zeta <= 0.0) {
      plan.warnings.push_back("depth " + std::to_string(d) +
                              ": confidence exponent zeta <= 0, horizon too small for the tree");
    }
    const double thr = refusal_threshold(dp.schedule->batch_length, dp.search_constant,
                                         dp.children.kappa, dp.schedule->beta_over_alpha());
    if (thr >= 0.5 * static_cast<double>(dp.schedule->batch_length)) {
      plan.warnings.push_back("depth " + std::to_string(d) +
                              ": refusal threshold >= T_exp/2, the search cannot converge early");
    }
    plan.depths.push_back(dp);
  }
  if (plan.minimum_horizon() > horizon) {
    plan.warnings.push_back("horizon " + std::to_string(horizon) +
                            " ends before the root's initialization sweep (needs " +
                            std::to_string(plan.minimum_horizon()) + ")");
  }
  return plan;
}

}  // namespace mailsim
