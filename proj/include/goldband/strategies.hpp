#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "goldband/bandit_core.hpp"
#include "goldband/random.hpp"
#include "goldband/schedule.hpp"

namespace goldband {

/// Bookkeeping shared by every recommender: observable per-arm statistics,
/// the calibration gate and the next/observe handshake.
///
/// Every recommender alternates next() and observe(); a second next() before
/// the matching observe(), or an observe() for a different action, throws
/// std::logic_error.
class RecommenderBase {
 public:
  explicit RecommenderBase(std::size_t arm_count)
      : stats_(arm_count), calibrated_(arm_count, false) {
    if (arm_count == 0) throw std::invalid_argument("recommender needs at least one arm");
  }

  std::size_t arm_count() const noexcept { return stats_.size(); }
  const std::vector<ArmStats>& stats() const noexcept { return stats_; }
  std::uint64_t steps_emitted() const noexcept { return steps_; }

  /// Applies the forced-completion gold task of `arm`. With
  /// `counts_as_recommended` the task also enters the recommended-gold
  /// averages (A forced to 1).
  void calibrate(std::size_t arm, const StepOutcome& outcome, bool counts_as_recommended = false) {
    if (arm >= stats_.size()) throw std::out_of_range("calibrate: arm out of range");
    if (calibrated_[arm]) throw std::logic_error("calibrate: arm already calibrated");
    if (steps_ != 0) throw std::logic_error("calibrate: recommendation already started");
    if (!outcome.accepted()) throw std::invalid_argument("calibrate: calibration is forced-accept");
    stats_[arm] = record_gold(stats_[arm], outcome, !counts_as_recommended);
    calibrated_[arm] = true;
  }

  bool calibrated() const noexcept {
    for (bool c : calibrated_)
      if (!c) return false;
    return true;
  }

 protected:
  /// Called first in every next(), so a rejected call leaves no trace.
  void require_ready() const {
    if (!calibrated()) throw std::logic_error("next() called before calibration");
    if (pending_) throw std::logic_error("next() called twice without observe()");
  }

  Action emit(Action a) {
    require_ready();
    pending_ = a;
    ++steps_;
    return a;
  }

  void record(const Action& a, const StepOutcome& outcome) {
    if (!pending_) throw std::logic_error("observe() without a pending action");
    if (!(*pending_ == a)) throw std::logic_error("observe() for an action that was not emitted");
    pending_.reset();
    stats_[a.arm] = a.is_gold() ? record_gold(stats_[a.arm], outcome, false)
                                : record_nongold(stats_[a.arm]);
  }

 private:
  std::vector<ArmStats> stats_;
  std::vector<bool> calibrated_;
  std::optional<Action> pending_;
  std::uint64_t steps_ = 0;
};

/// GR: epochs 1..K are one gold step on arm r-1. Epoch r > K opens with a gold
/// task on c_r, which is the greedy arm z_r with probability 1 - eps_r and a
/// uniformly random arm otherwise, followed by tau(r) - tau(r-1) non-gold
/// tasks on c_r.
class GreedyRecommender : public RecommenderBase {
 public:
  GreedyRecommender(std::size_t arm_count, GRConfig cfg, std::uint64_t seed,
                    SelectionMode mode = SelectionMode::Full)
      : RecommenderBase(arm_count), cfg_(cfg), mode_(mode), rng_(seed), chosen_(arm_count, 0) {
    cfg_.validate();
  }

  Action next() {
    require_ready();
    if (position_ == length_) start_epoch();
    const TaskKind kind = position_ == 0 ? TaskKind::Gold : TaskKind::NonGold;
    ++position_;
    return emit({arm_, kind});
  }

  void observe(const Action& a, const StepOutcome& outcome) { record(a, outcome); }

  /// Current epoch r (0 before the first step).
  std::uint64_t epoch() const noexcept { return epoch_; }
  bool epoch_complete() const noexcept { return position_ == length_; }
  std::uint64_t epoch_length() const noexcept { return length_; }
  std::size_t epoch_arm() const noexcept { return arm_; }
  /// z_r of the current epoch; empty during epochs 1..K.
  std::optional<std::size_t> greedy_arm() const noexcept { return greedy_; }
  /// T_k(r): epochs so far in which arm k was chosen.
  const std::vector<std::uint64_t>& epochs_chosen() const noexcept { return chosen_; }

  /// Steps in epoch r for K arms: 1 for r <= K, else 1 + tau(r) - tau(r-1).
  static std::uint64_t epoch_length_of(std::uint64_t r, std::size_t arm_count,
                                       const EpochSchedule& s) {
    return r <= arm_count ? 1 : 1 + tau_increment(r, s);
  }

 private:
  void start_epoch() {
    ++epoch_;
    const std::size_t k = arm_count();
    if (epoch_ <= k) {
      arm_ = static_cast<std::size_t>(epoch_ - 1);
      greedy_.reset();
    } else {
      greedy_ = select_empirical_best(stats(), mode_);
      const double eps = epsilon_r(epoch_, k, cfg_);
      arm_ = rng_.uniform() < eps ? rng_.index(k) : *greedy_;
    }
    length_ = epoch_length_of(epoch_, k, cfg_.schedule);
    position_ = 0;
    ++chosen_[arm_];
  }

  GRConfig cfg_;
  SelectionMode mode_;
  Rng rng_;
  std::vector<std::uint64_t> chosen_;
  std::uint64_t epoch_ = 0;
  std::uint64_t position_ = 0;
  std::uint64_t length_ = 0;
  std::size_t arm_ = 0;
  std::optional<std::size_t> greedy_;
};

/// UR and UR(gamma): epoch 1 is one gold task per arm; epoch r >= 2 is one gold
/// task per arm in ascending order, then tau(r) - tau(r-1) non-gold tasks on
/// the empirical best arm.
class UniformRecommender : public RecommenderBase {
 public:
  UniformRecommender(std::size_t arm_count, EpochSchedule schedule,
                     SelectionMode mode = SelectionMode::Full)
      : RecommenderBase(arm_count), schedule_(schedule), mode_(mode) {}

  Action next() {
    require_ready();
    if (position_ == length_) {
      ++epoch_;
      position_ = 0;
      length_ = arm_count() + (epoch_ == 1 ? 0 : tau_increment(epoch_, schedule_));
      selected_.reset();
    }
    const std::uint64_t pos = position_++;
    if (pos < arm_count()) return emit({static_cast<std::size_t>(pos), TaskKind::Gold});
    if (!selected_) selected_ = select_empirical_best(stats(), mode_);
    return emit({*selected_, TaskKind::NonGold});
  }

  void observe(const Action& a, const StepOutcome& outcome) { record(a, outcome); }

  std::uint64_t epoch() const noexcept { return epoch_; }
  bool epoch_complete() const noexcept { return position_ == length_; }
  std::optional<std::size_t> selected_arm() const noexcept { return selected_; }

 private:
  EpochSchedule schedule_;
  SelectionMode mode_;
  std::uint64_t epoch_ = 0;
  std::uint64_t position_ = 0;
  std::uint64_t length_ = 0;
  std::optional<std::size_t> selected_;
};

/// epsilon-first: K*H gold tasks round-robin (arm = t mod K), then the
/// empirical best arm is frozen for the remaining n - K*H steps.
class EpsilonFirstRecommender : public RecommenderBase {
 public:
  EpsilonFirstRecommender(std::size_t arm_count, EpsFirstConfig cfg,
                          SelectionMode mode = SelectionMode::Full)
      : RecommenderBase(arm_count), cfg_(cfg), mode_(mode) {
    cfg_.validate(arm_count);
  }

  Action next() {
    require_ready();
    if (t_ >= cfg_.horizon)
      throw std::logic_error("eps-first: horizon of " + std::to_string(cfg_.horizon) +
                             " steps exceeded");
    const std::uint64_t t = t_++;
    if (t < exploration_steps())
      return emit({static_cast<std::size_t>(t % arm_count()), TaskKind::Gold});
    if (!frozen_) frozen_ = select_empirical_best(stats(), mode_);
    return emit({*frozen_, TaskKind::NonGold});
  }

  void observe(const Action& a, const StepOutcome& outcome) { record(a, outcome); }

  std::uint64_t exploration_steps() const noexcept {
    return arm_count() * cfg_.exploration_per_arm;
  }
  std::optional<std::size_t> frozen_arm() const noexcept { return frozen_; }

 private:
  EpsFirstConfig cfg_;
  SelectionMode mode_;
  std::uint64_t t_ = 0;
  std::optional<std::size_t> frozen_;
};

/// Hybrid UR / epsilon-first. Epoch 1 is one gold task per arm. Epoch r >= 2
/// has L_r = tau(r) - tau(r-1) + K steps: the first max(K, ceil(f L_r)) are
/// gold, each placed on the arm with the fewest recommended gold tasks
/// (re-evaluated every step, lowest index on ties); the rest are non-gold on
/// the empirical best arm.
class HybridRecommender : public RecommenderBase {
 public:
  HybridRecommender(std::size_t arm_count, HybridConfig cfg,
                    SelectionMode mode = SelectionMode::Full)
      : RecommenderBase(arm_count), cfg_(cfg), mode_(mode) {
    cfg_.validate();
  }

  Action next() {
    require_ready();
    if (position_ == length_) {
      ++epoch_;
      position_ = 0;
      if (epoch_ == 1) {
        length_ = gold_ = arm_count();
      } else {
        length_ = tau_increment(epoch_, cfg_.schedule) + arm_count();
        gold_ = hybrid_gold_steps(length_, arm_count(), cfg_.explore_fraction);
      }
      selected_.reset();
    }
    const std::uint64_t pos = position_++;
    if (epoch_ == 1) return emit({static_cast<std::size_t>(pos), TaskKind::Gold});
    if (pos < gold_) return emit({least_sampled(), TaskKind::Gold});
    if (!selected_) selected_ = select_empirical_best(stats(), mode_);
    return emit({*selected_, TaskKind::NonGold});
  }

  void observe(const Action& a, const StepOutcome& outcome) { record(a, outcome); }

  std::uint64_t epoch() const noexcept { return epoch_; }
  bool epoch_complete() const noexcept { return position_ == length_; }
  std::uint64_t epoch_gold_steps() const noexcept { return gold_; }
  std::uint64_t epoch_length() const noexcept { return length_; }

 private:
  std::size_t least_sampled() const {
    const auto& s = stats();
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i].gold_recommended < s[best].gold_recommended) best = i;
    return best;
  }

  HybridConfig cfg_;
  SelectionMode mode_;
  std::uint64_t epoch_ = 0;
  std::uint64_t position_ = 0;
  std::uint64_t length_ = 0;
  std::uint64_t gold_ = 0;
  std::optional<std::size_t> selected_;
};

using Recommender = std::variant<GreedyRecommender, UniformRecommender, EpsilonFirstRecommender,
                                 HybridRecommender>;

enum class StrategyKind : std::uint8_t { Greedy, Uniform, EpsilonFirst, Hybrid };

inline std::string_view to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::Greedy: return "gr";
    case StrategyKind::Uniform: return "ur";
    case StrategyKind::EpsilonFirst: return "eps-first";
    case StrategyKind::Hybrid: return "hybrid";
  }
  return "gr";
}

/// Accepts the CLI names; "ur-gamma" is UR with a caller-supplied gamma.
inline StrategyKind parse_strategy_kind(std::string_view s) {
  if (s == "gr") return StrategyKind::Greedy;
  if (s == "ur" || s == "ur-gamma") return StrategyKind::Uniform;
  if (s == "eps-first") return StrategyKind::EpsilonFirst;
  if (s == "hybrid") return StrategyKind::Hybrid;
  throw std::invalid_argument("unknown strategy '" + std::string(s) +
                              "' (expected gr | ur | ur-gamma | eps-first | hybrid)");
}

/// Everything needed to build one recommender; the arm count and horizon come
/// from the experiment.
struct StrategyConfig {
  StrategyKind kind = StrategyKind::Greedy;
  double alpha = 0.1;
  double gamma = 2.0;
  double c = 0.05;
  double d = 0.1;
  double explore_fraction = 0.1;
  /// epsilon-first H; floor(sqrt(n)) when empty.
  std::optional<std::uint64_t> exploration_per_arm;
  SelectionMode mode = SelectionMode::Full;
  /// Overrides the derived label when non-empty.
  std::string label;

  friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;

  EpochSchedule schedule() const { return EpochSchedule(alpha, gamma); }

  std::uint64_t exploration_for(std::uint64_t horizon) const {
    return exploration_per_arm.value_or(isqrt(horizon));
  }

  /// Stable name such as "gr", "ur(1.5)", "ur(alpha=0.5)" or
  /// "eps-first/pref-only". Only parameters that differ from the defaults and
  /// matter to the kind appear.
  std::string resolved_label() const {
    if (!label.empty()) return label;
    std::vector<std::string> parts;
    auto num = [](double v) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", v);
      return std::string(buf);
    };
    const bool epochs = kind != StrategyKind::EpsilonFirst;
    if (epochs && gamma != 2.0) parts.push_back(kind == StrategyKind::Uniform ? num(gamma)
                                                                               : "gamma=" + num(gamma));
    if (epochs && alpha != 0.1) parts.push_back("alpha=" + num(alpha));
    if (kind == StrategyKind::Greedy && c != 0.05) parts.push_back("c=" + num(c));
    if (kind == StrategyKind::Greedy && d != 0.1) parts.push_back("d=" + num(d));
    if (kind == StrategyKind::Hybrid && explore_fraction != 0.1)
      parts.push_back("f=" + num(explore_fraction));
    if (kind == StrategyKind::EpsilonFirst && exploration_per_arm)
      parts.push_back("H=" + std::to_string(*exploration_per_arm));

    std::string out(to_string(kind));
    if (!parts.empty()) {
      out += '(';
      for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
      out += ')';
    }
    if (mode != SelectionMode::Full) out += "/" + std::string(to_string(mode));
    return out;
  }

  /// Throws std::invalid_argument naming the offending parameter.
  void validate(std::size_t arm_count, std::uint64_t horizon) const {
    switch (kind) {
      case StrategyKind::Greedy: GRConfig{schedule(), c, d}.validate(); break;
      case StrategyKind::Uniform: (void)schedule(); break;
      case StrategyKind::EpsilonFirst:
        EpsFirstConfig{horizon, exploration_for(horizon)}.validate(arm_count);
        break;
      case StrategyKind::Hybrid: HybridConfig{schedule(), explore_fraction}.validate(); break;
    }
  }
};

inline Recommender make_recommender(const StrategyConfig& cfg, std::size_t arm_count,
                                    std::uint64_t horizon, std::uint64_t seed) {
  cfg.validate(arm_count, horizon);
  switch (cfg.kind) {
    case StrategyKind::Greedy:
      return GreedyRecommender(arm_count, GRConfig{cfg.schedule(), cfg.c, cfg.d}, seed, cfg.mode);
    case StrategyKind::Uniform:
      return UniformRecommender(arm_count, cfg.schedule(), cfg.mode);
    case StrategyKind::EpsilonFirst:
      return EpsilonFirstRecommender(
          arm_count, EpsFirstConfig{horizon, cfg.exploration_for(horizon)}, cfg.mode);
    case StrategyKind::Hybrid:
      return HybridRecommender(arm_count, HybridConfig{cfg.schedule(), cfg.explore_fraction},
                               cfg.mode);
  }
  throw std::invalid_argument("unknown strategy kind");
}

}  // namespace goldband
