#include "mailsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mailsim {

std::vector<long long> checkpoint_grid(long long horizon, long long dense_until, int count) {
  std::vector<long long> grid;
  for (long long t = 1; t < dense_until && t <= horizon; ++t) grid.push_back(t);
  const double lo = std::log(static_cast<double>(std::max(1LL, std::min(dense_until, horizon))));
  const double hi = std::log(static_cast<double>(horizon));
  for (int i = 0; i < count; ++i) {
    const double frac = count > 1 ? static_cast<double>(i) / (count - 1) : 1.0;
    grid.push_back(std::clamp(std::llround(std::exp(lo + frac * (hi - lo))), 1LL, horizon));
  }
  for (long long t : {horizon / 4, horizon / 2, horizon}) {
    if (t >= 1) grid.push_back(t);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

Game::Game(const Environment& env, const OracleSolution& sol, const GameOptions& options)
    : env_(env),
      sol_(sol),
      options_(options),
      plan_(build_plan(env.tree().depth(), env.tree().breadth(), env.arms(), options.horizon,
                       options.mode)),
      ledger_(env.tree().size()) {
  const Tree& tree = env.tree();
  const DepthPlan& root = plan_.at_depth(tree.depth());
  if (options.horizon < root.commit_start() - 1) {
    throw std::invalid_argument(
        "horizon " + std::to_string(options.horizon) +
        " is shorter than the exploration schedule (root commits at round " +
        std::to_string(root.commit_start()) + ")");
  }
  child_position_.assign(tree.size(), 0);
  for (const Node& n : tree.nodes()) {
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      child_position_[static_cast<std::size_t>(n.children[i])] = i;
    }
  }
  for (const Node& n : tree.nodes()) {
    const bool scripted = std::find(options.scripted.begin(), options.scripted.end(), n.id) !=
                          options.scripted.end();
    if (scripted) {
      policies_.push_back(std::make_unique<OracleResponder>(env, sol, n.id));
    } else {
      policies_.push_back(std::make_unique<MailPlayer>(
          n.id, env.arms(), static_cast<int>(n.children.size()), tree.breadth(),
          options.horizon, plan_.at_depth(n.depth),
          make_stream(options.master_seed, static_cast<std::uint64_t>(n.id),
                      StreamPurpose::kPolicy)));
    }
    noise_.push_back(make_stream(options.master_seed, static_cast<std::uint64_t>(n.id),
                                 StreamPurpose::kNoise));
  }
  record_.nodes.resize(tree.size());
}

const MailPlayer* Game::mail_player(NodeId v) const {
  return dynamic_cast<const MailPlayer*>(policies_.at(static_cast<std::size_t>(v)).get());
}

const RoundRecord& Game::step() {
  if (t_ >= options_.horizon) throw std::logic_error("Game::step: horizon reached");
  const long long t = ++t_;
  const Tree& tree = env_.tree();
  const std::size_t k = static_cast<std::size_t>(env_.arms());
  record_.t = t;

  // Parents decide before children, so each node sees this round's contract.
  for (const Node& n : tree.nodes()) {
    NodeRound& r = record_.nodes[static_cast<std::size_t>(n.id)];
    if (n.parent) {
      r.received = record_.nodes[static_cast<std::size_t>(*n.parent)]
                       .issued[child_position_[static_cast<std::size_t>(n.id)]];
    } else {
      r.received.reset();
    }
    Decision d = policies_[static_cast<std::size_t>(n.id)]->decide(t, r.received);
    r.action = d.action;
    r.issued = std::move(d.contracts);
  }

  double sum_reward = 0.0;
  double sum_utility = 0.0;
  std::vector<Arm> child_actions;
  for (const Node& n : tree.nodes()) {
    NodeRound& r = record_.nodes[static_cast<std::size_t>(n.id)];
    std::size_t joint = static_cast<std::size_t>(r.action);
    r.complied.assign(n.children.size(), false);
    for (std::size_t w = 0; w < n.children.size(); ++w) {
      const Arm played = record_.nodes[static_cast<std::size_t>(n.children[w])].action;
      joint = joint * k + static_cast<std::size_t>(played);
      r.complied[w] = played == r.issued[w].arm;
    }
    r.reward = draw_reward(env_, n.id, joint, noise_[static_cast<std::size_t>(n.id)]);
    r.utility = settle_utility(r);
    sum_reward += r.reward;
    sum_utility += r.utility;
  }
  const double err = std::abs(sum_utility - sum_reward);
  diagnostics_.max_conservation_error = std::max(diagnostics_.max_conservation_error, err);
  if (err > kConservationTolerance) ++diagnostics_.conservation_violations;

  for (const Node& n : tree.nodes()) {
    const NodeRound& r = record_.nodes[static_cast<std::size_t>(n.id)];
    child_actions.clear();
    for (NodeId c : n.children) child_actions.push_back(record_.nodes[static_cast<std::size_t>(c)].action);
    policies_[static_cast<std::size_t>(n.id)]->observe(t, child_actions, r.reward);
  }

  const double welfare_before = ledger_.welfare();
  accumulate_regret(env_, sol_, record_, ledger_);
  welfare_and_w1(env_, sol_, record_, ledger_);
  if (ledger_.welfare() - welfare_before < -1e-12) ++diagnostics_.negative_welfare_increments;
  for (const NodeRegret& nr : ledger_.nodes()) {
    if (!decomposition_holds(nr)) ++diagnostics_.decomposition_violations;
  }
  if (options_.trace) write_trace();
  return record_;
}

LedgerSnapshot Game::snapshot() const {
  LedgerSnapshot s;
  s.t = t_;
  s.nodes = ledger_.nodes();
  s.welfare = ledger_.welfare();
  for (std::size_t v = 0; v < s.nodes.size(); ++v) s.w1.push_back(ledger_.w1(static_cast<NodeId>(v)));
  return s;
}

void Game::write_trace() const {
  std::ostream& os = *options_.trace;
  for (std::size_t v = 0; v < record_.nodes.size(); ++v) {
    const NodeRound& r = record_.nodes[v];
    os << record_.t << ' ' << v << ' '
       << to_string(policies_[v]->phase(record_.t)) << " recv=";
    if (r.received) {
      os << r.received->arm << ':' << r.received->transfer;
    } else {
      os << '-';
    }
    os << " a=" << r.action << " issued=";
    for (std::size_t w = 0; w < r.issued.size(); ++w) {
      os << (w ? "," : "") << r.issued[w].arm << ':' << r.issued[w].transfer
         << (r.complied[w] ? "+" : "x");
    }
    os << " x=" << r.reward << " u=" << r.utility << '\n';
  }
}

GameResult run_game(const Environment& env, const OracleSolution& sol,
                    const GameOptions& options) {
  Game game(env, sol, options);
  const std::vector<long long> grid =
      options.checkpoints.empty() ? checkpoint_grid(options.horizon) : options.checkpoints;
  GameResult result;
  result.plan = game.plan();
  auto next = grid.begin();
  while (game.t() < options.horizon) {
    game.step();
    while (next != grid.end() && *next < game.t()) ++next;
    if (next != grid.end() && *next == game.t()) {
      result.series.push_back(game.snapshot());
      ++next;
    }
  }
  result.diagnostics = game.diagnostics();
  return result;
}

}  // namespace mailsim
