#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "goldband/random.hpp"

namespace goldband {

/// Ground truth for one task category: the worker answers correctly with
/// probability `reliability` (given acceptance) and accepts a recommended task
/// with probability `preference`.
class ArmParams {
 public:
  ArmParams(double reliability, double preference)
      : reliability_(reliability), preference_(preference) {
    if (!(reliability >= 0.0 && reliability <= 1.0))
      throw std::invalid_argument("reliability must lie in [0,1], got " +
                                  std::to_string(reliability));
    if (!(preference >= 0.0 && preference <= 1.0))
      throw std::invalid_argument("preference must lie in [0,1], got " +
                                  std::to_string(preference));
  }

  double reliability() const noexcept { return reliability_; }
  double preference() const noexcept { return preference_; }
  /// Variance of one correctness draw, p(1-p).
  double variance() const noexcept { return reliability_ * (1.0 - reliability_); }
  /// Success probability of one recommendation, q*p.
  double product() const noexcept { return preference_ * reliability_; }

  friend bool operator==(const ArmParams&, const ArmParams&) = default;

 private:
  double reliability_;
  double preference_;
};

enum class TaskKind : std::uint8_t { Gold, NonGold };

/// A recommendation decision. `arm` is a zero-based category index.
struct Action {
  std::size_t arm = 0;
  TaskKind kind = TaskKind::Gold;

  bool is_gold() const noexcept { return kind == TaskKind::Gold; }
  friend bool operator==(const Action&, const Action&) = default;
};

/// What the worker did with one recommended task. `correct` is engaged iff
/// the task was accepted.
class StepOutcome {
 public:
  static StepOutcome rejected() noexcept { return StepOutcome{}; }
  static StepOutcome accepted_with(bool correct) noexcept {
    StepOutcome o;
    o.correct_ = correct;
    return o;
  }

  bool accepted() const noexcept { return correct_.has_value(); }
  std::optional<bool> correct() const noexcept { return correct_; }
  /// A*X: one when accepted and correct.
  bool success() const noexcept { return correct_.value_or(false); }

  friend bool operator==(const StepOutcome&, const StepOutcome&) = default;

 private:
  std::optional<bool> correct_;
};

/// Everything a strategy may observe about one arm.
///
/// gold_completed and sum_correct_completed include the calibration task;
/// gold_recommended, gold_accepted and sum_y_recommended do not.
struct ArmStats {
  std::uint64_t gold_recommended = 0;
  std::uint64_t gold_accepted = 0;
  std::uint64_t gold_completed = 0;
  std::uint64_t sum_correct_completed = 0;
  std::uint64_t sum_y_recommended = 0;
  std::uint64_t nongold_recommended = 0;

  /// N_k: every task recommended on this arm.
  std::uint64_t recommended() const noexcept {
    return gold_recommended + nongold_recommended;
  }

  friend bool operator==(const ArmStats&, const ArmStats&) = default;
};

inline ArmStats record_gold(ArmStats stats, const StepOutcome& outcome,
                            bool is_calibration) noexcept {
  if (!is_calibration) {
    ++stats.gold_recommended;
    if (outcome.accepted()) ++stats.gold_accepted;
    if (outcome.success()) ++stats.sum_y_recommended;
  }
  if (outcome.accepted()) ++stats.gold_completed;
  if (outcome.success()) ++stats.sum_correct_completed;
  return stats;
}

inline ArmStats record_nongold(ArmStats stats) noexcept {
  ++stats.nongold_recommended;
  return stats;
}

/// Empirical reliability over completed gold tasks.
inline double x_bar(const ArmStats& s) {
  if (s.gold_completed == 0)
    throw std::domain_error("x_bar: no completed gold task (calibration missing)");
  return static_cast<double>(s.sum_correct_completed) /
         static_cast<double>(s.gold_completed);
}

/// Empirical success rate A*X over recommended gold tasks.
inline double y_bar(const ArmStats& s) {
  if (s.gold_recommended == 0)
    throw std::domain_error("y_bar: no recommended gold task");
  return static_cast<double>(s.sum_y_recommended) /
         static_cast<double>(s.gold_recommended);
}

/// Empirical acceptance rate over recommended gold tasks.
inline double acceptance_rate(const ArmStats& s) {
  if (s.gold_recommended == 0)
    throw std::domain_error("acceptance_rate: no recommended gold task");
  return static_cast<double>(s.gold_accepted) /
         static_cast<double>(s.gold_recommended);
}

/// Lowest-index argmax of values. Throws on an empty range.
inline std::size_t argmax_lowest(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax over an empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

struct BestArm {
  std::size_t index;
  double value;
};

/// Arm maximizing q*p, lowest index on ties.
inline BestArm best_arm(std::span<const ArmParams> arms) {
  if (arms.empty()) throw std::invalid_argument("best_arm: empty arm list");
  BestArm best{0, arms[0].product()};
  for (std::size_t i = 1; i < arms.size(); ++i)
    if (arms[i].product() > best.value) best = {i, arms[i].product()};
  return best;
}

/// q*p* minus the best q_k p_k among the other arms (the smallest gap
/// Delta_k). Zero when K = 1.
inline double min_gap(std::span<const ArmParams> arms) {
  const BestArm best = best_arm(arms);
  double runner_up = -1.0;
  for (std::size_t i = 0; i < arms.size(); ++i)
    if (i != best.index && arms[i].product() > runner_up) runner_up = arms[i].product();
  return runner_up < 0.0 ? 0.0 : best.value - runner_up;
}

/// Simulated worker. Draw contract per call, all from one Rng:
///   sample_step:        one draw for acceptance, then one for correctness
///                       only if accepted;
///   sample_calibration: one draw for correctness.
class WorkerModel {
 public:
  WorkerModel(std::vector<ArmParams> arms, std::uint64_t seed)
      : arms_(std::move(arms)), rng_(seed) {
    if (arms_.empty()) throw std::invalid_argument("WorkerModel needs at least one arm");
  }

  std::size_t arm_count() const noexcept { return arms_.size(); }
  const std::vector<ArmParams>& arms() const noexcept { return arms_; }

  StepOutcome sample_step(std::size_t arm) {
    const ArmParams& a = at(arm);
    if (!rng_.bernoulli(a.preference())) return StepOutcome::rejected();
    return StepOutcome::accepted_with(rng_.bernoulli(a.reliability()));
  }

  StepOutcome sample_calibration(std::size_t arm) {
    return StepOutcome::accepted_with(rng_.bernoulli(at(arm).reliability()));
  }

 private:
  const ArmParams& at(std::size_t arm) const {
    if (arm >= arms_.size())
      throw std::out_of_range("arm index " + std::to_string(arm) + " out of range for K=" +
                              std::to_string(arms_.size()));
    return arms_[arm];
  }

  std::vector<ArmParams> arms_;
  Rng rng_;
};

}  // namespace goldband
