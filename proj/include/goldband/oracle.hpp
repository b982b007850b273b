#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "goldband/bandit_core.hpp"
#include "goldband/harness.hpp"
#include "goldband/schedule.hpp"
#include "goldband/strategies.hpp"

namespace goldband {

struct EnumerationResult {
  double exact_expected_reward = 0.0;
  double exact_expected_regret = 0.0;
  std::uint64_t outcome_count = 0;
  /// Sum of all atom probabilities; 1 up to rounding.
  double probability_mass = 0.0;
};

/// One joint outcome of the calibration draws and the exploration gold tasks
/// of epsilon-first.
struct EpsFirstAtom {
  std::uint64_t index = 0;
  double probability = 0.0;
  std::vector<StepOutcome> calibration;  ///< one per arm
  std::vector<StepOutcome> exploration;  ///< K*H gold outcomes in schedule order
  std::size_t exploited_arm = 0;
  double reward = 0.0;  ///< semi-analytic exploitation reward given this atom
};

inline constexpr std::uint64_t kMaxEnumerationAtoms = 100000;

/// Visits every atom of epsilon-first (Full mode, H = floor(sqrt(n))) in
/// ascending atom index. Each exploration gold task has three atoms, rejected
/// (1-q), accepted and correct (qp) and accepted and wrong (q(1-p)); each
/// calibration task has two.
///
/// The exploitation reward is evaluated here from first principles rather
/// than through the accounting module, so the two can be compared.
template <class Visit>
void for_each_eps_first_atom(std::uint64_t n, std::span<const ArmParams> arms, double beta,
                             Visit&& visit) {
  const std::size_t k = arms.size();
  if (k == 0) throw std::invalid_argument("enumeration: no arms");
  if (n == 0 || n > 8 || k > 3)
    throw std::invalid_argument("enumeration: instance too large (need n <= 8, K <= 3)");
  const std::uint64_t h = isqrt(n);
  const std::uint64_t gold = k * h;
  if (gold > n) throw std::invalid_argument("enumeration: K*H exceeds n");
  std::uint64_t explore_atoms = 1;
  for (std::uint64_t i = 0; i < gold; ++i) explore_atoms *= 3;
  const std::uint64_t calib_atoms = std::uint64_t{1} << k;
  if (calib_atoms * explore_atoms > kMaxEnumerationAtoms)
    throw std::invalid_argument("enumeration: instance too large");

  EpsFirstAtom atom;
  atom.calibration.resize(k);
  atom.exploration.resize(gold);
  std::vector<std::uint64_t> completed(k);
  std::vector<std::uint64_t> successes(k);

  for (std::uint64_t cal = 0; cal < calib_atoms; ++cal) {
    double p_cal = 1.0;
    for (std::size_t arm = 0; arm < k; ++arm) {
      const bool correct = (cal >> arm) & 1U;
      const double p = arms[arm].reliability();
      p_cal *= correct ? p : 1.0 - p;
      atom.calibration[arm] = StepOutcome::accepted_with(correct);
    }
    for (std::uint64_t ex = 0; ex < explore_atoms; ++ex) {
      double prob = p_cal;
      std::fill(completed.begin(), completed.end(), 1);  // calibration
      std::fill(successes.begin(), successes.end(), 0);
      std::uint64_t code = ex;
      for (std::uint64_t t = 0; t < gold; ++t, code /= 3) {
        const std::size_t arm = static_cast<std::size_t>(t % k);
        const double p = arms[arm].reliability();
        const double q = arms[arm].preference();
        switch (code % 3) {
          case 0:
            prob *= 1.0 - q;
            atom.exploration[t] = StepOutcome::rejected();
            break;
          case 1:
            prob *= q * p;
            ++completed[arm];
            ++successes[arm];
            atom.exploration[t] = StepOutcome::accepted_with(true);
            break;
          default:
            prob *= q * (1.0 - p);
            ++completed[arm];
            atom.exploration[t] = StepOutcome::accepted_with(false);
            break;
        }
      }
      // Every arm has exactly h recommended gold tasks, so comparing success
      // counts is comparing y_bar.
      std::size_t chosen = 0;
      for (std::size_t arm = 1; arm < k; ++arm)
        if (successes[arm] > successes[chosen]) chosen = arm;
      const double p = arms[chosen].reliability();
      const double q = arms[chosen].preference();
      double per_step = p - beta * p * (1.0 - p) / static_cast<double>(completed[chosen]);
      if (per_step < 0.0) per_step = 0.0;

      atom.index = cal * explore_atoms + ex;
      atom.probability = prob;
      atom.exploited_arm = chosen;
      atom.reward = static_cast<double>(n - gold) * q * per_step;
      visit(static_cast<const EpsFirstAtom&>(atom));
    }
  }
}

/// Exact expected reward and regret of epsilon-first on a tiny instance.
inline EnumerationResult enumerate_eps_first(std::uint64_t n, std::span<const ArmParams> arms,
                                             double beta) {
  EnumerationResult r;
  for_each_eps_first_atom(n, arms, beta, [&](const EpsFirstAtom& a) {
    r.probability_mass += a.probability;
    r.exact_expected_reward += a.probability * a.reward;
    ++r.outcome_count;
  });
  r.exact_expected_regret = static_cast<double>(n) * best_arm(arms).value - r.exact_expected_reward;
  return r;
}

/// Worker that replays fixed outcomes: calibration[k] for arm k, then the
/// queued step outcomes in order. Once the queue is empty every task is
/// rejected.
class ReplayWorker {
 public:
  ReplayWorker(std::vector<StepOutcome> calibration, std::vector<StepOutcome> steps)
      : calibration_(std::move(calibration)), steps_(steps.begin(), steps.end()) {}

  StepOutcome sample_calibration(std::size_t arm) const { return calibration_.at(arm); }

  StepOutcome sample_step(std::size_t) {
    if (steps_.empty()) return StepOutcome::rejected();
    const StepOutcome o = steps_.front();
    steps_.pop_front();
    return o;
  }

 private:
  std::vector<StepOutcome> calibration_;
  std::deque<StepOutcome> steps_;
};

/// Mean and standard error of final regret computed from realized rewards
/// (not the semi-analytic form).
inline MeanStd mc_reference(const StrategyConfig& strategy, std::vector<ArmParams> arms,
                            std::uint64_t horizon, std::uint64_t trials, std::uint64_t seed,
                            double beta, RunOptions options = {}) {
  if (trials < 2) throw std::invalid_argument("mc_reference needs at least 2 trials");
  ExperimentSpec spec;
  spec.arms = std::move(arms);
  spec.strategies = {strategy};
  spec.trials = trials;
  spec.horizon = horizon;
  spec.beta = beta;
  spec.master_seed = seed;
  spec.checkpoint_stride = horizon;
  return run_experiment(spec, options).front().final_realized_regret();
}

}  // namespace goldband
