#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "goldband/bandit_core.hpp"

namespace goldband {

struct RewardConfig {
  double beta = 10.0;

  void validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta))
      throw std::invalid_argument("beta must be non-negative, got " + std::to_string(beta));
  }
};

namespace detail {
inline void require_gold_count(std::uint64_t g) {
  if (g == 0) throw std::domain_error("completed gold count must be >= 1");
}
}  // namespace detail

/// Reward of one completed non-gold task on an arm of reliability p after g
/// completed gold tasks: (p - beta p(1-p)/g)^+.
inline double step_reward_value(double p, double beta, std::uint64_t g) {
  detail::require_gold_count(g);
  return std::max(0.0, p - beta * p * (1.0 - p) / static_cast<double>(g));
}

/// Expected reward of recommending one non-gold task: q (p - beta sigma^2/g)^+.
inline double expected_step_reward(const ArmParams& arm, double beta, std::uint64_t g) {
  return arm.preference() * step_reward_value(arm.reliability(), beta, g);
}

/// One realization of the non-gold reward, for cross-checking the
/// semi-analytic accounting: A (X - beta sigma^2/g) when p exceeds the
/// penalty, zero otherwise.
///
/// Its conditional expectation given g is exactly expected_step_reward().
/// Clamping each realization instead, A (X - beta sigma^2/g)^+, has mean
/// q p (1 - beta sigma^2/g)^+ and overstates the reward by q c (1-p) per step.
inline double realized_step_reward(const StepOutcome& outcome, double p, double beta,
                                   std::uint64_t g) {
  detail::require_gold_count(g);
  const double penalty = beta * p * (1.0 - p) / static_cast<double>(g);
  if (!outcome.accepted() || !(p > penalty)) return 0.0;
  return (outcome.success() ? 1.0 : 0.0) - penalty;
}

/// Closed-form lower bound on regret after n steps: 2 sqrt(a q*p* n) - a with
/// a = beta min_k q_k sigma_k^2.
inline double regret_lower_bound(std::uint64_t n, std::span<const ArmParams> arms, double beta) {
  if (n == 0) throw std::invalid_argument("regret_lower_bound: n must be >= 1");
  const double best = best_arm(arms).value;
  double min_term = arms[0].preference() * arms[0].variance();
  for (const ArmParams& a : arms) min_term = std::min(min_term, a.preference() * a.variance());
  const double a = beta * min_term;
  return 2.0 * std::sqrt(a * best * static_cast<double>(n)) - a;
}

/// Per-step record of one trial.
///
/// Regret uses the semi-analytic reward: for each non-gold step the expected
/// reward given the realized schedule and gold counts. Gold steps earn
/// nothing and cost q*p*. When outcomes are supplied the realized-reward
/// regret is tracked alongside.
class RegretTrajectory {
 public:
  RegretTrajectory() = default;
  explicit RegretTrajectory(std::size_t expected_steps) {
    regret_.reserve(expected_steps);
    reward_.reserve(expected_steps);
    realized_regret_.reserve(expected_steps);
    actions_.reserve(expected_steps);
  }

  /// `gold_completed` is the arm's completed-gold count (calibration included)
  /// when the action was emitted.
  void accumulate(const Action& action, const ArmParams& arm, double best_value,
                  std::uint64_t gold_completed, double beta,
                  std::optional<StepOutcome> realized = std::nullopt) {
    detail::require_gold_count(gold_completed);
    double reward = 0.0;
    double realized_reward = 0.0;
    if (action.is_gold()) {
      ++gold_;
    } else {
      reward = expected_step_reward(arm, beta, gold_completed);
      if (realized)
        realized_reward = realized_step_reward(*realized, arm.reliability(), beta, gold_completed);
    }
    const double prev_regret = regret_.empty() ? 0.0 : regret_.back();
    const double prev_reward = reward_.empty() ? 0.0 : reward_.back();
    const double prev_realized = realized_regret_.empty() ? 0.0 : realized_regret_.back();
    regret_.push_back(prev_regret + (best_value - reward));
    reward_.push_back(prev_reward + reward);
    realized_regret_.push_back(prev_realized + (best_value - realized_reward));
    actions_.push_back(action);
  }

  std::size_t size() const noexcept { return regret_.size(); }
  /// Cumulative semi-analytic regret after each step.
  const std::vector<double>& cumulative_regret() const noexcept { return regret_; }
  /// Cumulative semi-analytic reward after each step.
  const std::vector<double>& cumulative_reward() const noexcept { return reward_; }
  /// Cumulative realized-reward regret; meaningful only if every step was
  /// accumulated with its outcome.
  const std::vector<double>& cumulative_realized_regret() const noexcept {
    return realized_regret_;
  }
  const std::vector<Action>& actions() const noexcept { return actions_; }
  /// f(n): gold tasks recommended so far.
  std::uint64_t gold_count() const noexcept { return gold_; }
  double final_regret() const noexcept { return regret_.empty() ? 0.0 : regret_.back(); }

 private:
  std::vector<double> regret_;
  std::vector<double> reward_;
  std::vector<double> realized_regret_;
  std::vector<Action> actions_;
  std::uint64_t gold_ = 0;
};

}  // namespace goldband
