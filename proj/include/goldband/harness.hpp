#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "goldband/accounting.hpp"
#include "goldband/bandit_core.hpp"
#include "goldband/random.hpp"
#include "goldband/strategies.hpp"

namespace goldband {

/// Worker parameter sets 1-5. Setting 2 takes the free pair (x, y) for arm 2.
inline std::vector<ArmParams> builtin_setting(int number, std::optional<double> x = std::nullopt,
                                              std::optional<double> y = std::nullopt) {
  if (number < 1 || number > 5)
    throw std::invalid_argument("setting must be 1..5, got " + std::to_string(number));
  if (number == 2 && (!x || !y)) throw std::invalid_argument("setting 2 requires --x and --y");
  if (number != 2 && (x || y)) throw std::invalid_argument("--x/--y only apply to setting 2");

  const ArmParams low(0.4, 0.4);
  std::vector<ArmParams> arms;
  switch (number) {
    case 1:
      arms = {ArmParams(0.7, 0.7), ArmParams(0.9, 0.3), ArmParams(0.3, 0.9)};
      arms.resize(10, low);
      break;
    case 2:
      arms = {ArmParams(0.7, 0.7), ArmParams(*x, *y)};
      arms.resize(10, low);
      break;
    default: {
      const std::size_t k = number == 3 ? 10 : number == 4 ? 15 : 25;
      arms = {ArmParams(0.8, 0.8)};
      arms.resize(k, low);
    }
  }
  return arms;
}

struct ExperimentSpec {
  /// Explicit arms; ignored when `setting` is set.
  std::vector<ArmParams> arms;
  std::optional<int> setting;
  std::optional<double> x;
  std::optional<double> y;
  std::vector<StrategyConfig> strategies;
  std::uint64_t trials = 2000;
  std::uint64_t horizon = 1000;
  double beta = 10.0;
  std::uint64_t master_seed = 0;
  std::uint64_t checkpoint_stride = 1;
  /// Count each calibration task as a recommended gold task in y_bar.
  bool calibration_in_ybar = false;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;

  std::vector<ArmParams> resolved_arms() const {
    if (setting) return builtin_setting(*setting, x, y);
    return arms;
  }

  void validate() const {
    if (setting && !arms.empty())
      throw std::invalid_argument("give either a builtin setting or explicit arms, not both");
    const auto resolved = resolved_arms();
    if (resolved.empty()) throw std::invalid_argument("no arms: give --setting or --arms-file");
    if (trials == 0) throw std::invalid_argument("trials must be >= 1");
    if (horizon == 0) throw std::invalid_argument("horizon must be >= 1");
    if (checkpoint_stride == 0) throw std::invalid_argument("stride must be >= 1");
    RewardConfig{beta}.validate();
    if (strategies.empty()) throw std::invalid_argument("at least one strategy is required");
    std::set<std::string> labels;
    for (const auto& s : strategies) {
      s.validate(resolved.size(), horizon);
      if (!labels.insert(s.resolved_label()).second)
        throw std::invalid_argument("duplicate strategy label '" + s.resolved_label() + "'");
    }
  }

  /// FNV-1a of a canonical text rendering of every field.
  std::string fingerprint() const {
    std::string canon;
    auto put = [&canon](double v) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g;", v);
      canon += buf;
    };
    for (const auto& a : resolved_arms()) {
      put(a.reliability());
      put(a.preference());
    }
    canon += "|";
    for (const auto& s : strategies) {
      canon += s.resolved_label() + ";";
      put(s.alpha), put(s.gamma), put(s.c), put(s.d), put(s.explore_fraction);
      put(static_cast<double>(s.exploration_for(horizon)));
      canon += std::string(to_string(s.mode)) + "|";
    }
    put(static_cast<double>(trials));
    put(static_cast<double>(horizon));
    put(beta);
    canon += std::to_string(master_seed) + ";" + std::to_string(checkpoint_stride) +
             (calibration_in_ybar ? ";cal" : ";");
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(canon)));
    return hex;
  }
};

/// Steps (1-based) at which curves are sampled: stride, 2*stride, ... and n.
inline std::vector<std::uint64_t> checkpoint_steps(std::uint64_t horizon, std::uint64_t stride) {
  if (stride == 0) throw std::invalid_argument("stride must be >= 1");
  std::vector<std::uint64_t> steps;
  for (std::uint64_t s = stride; s <= horizon; s += stride) steps.push_back(s);
  if (steps.empty() || steps.back() != horizon) steps.push_back(horizon);
  return steps;
}

/// Runs one trial of `rec` against `worker`: calibration, then `horizon`
/// next/observe steps. Works with any worker exposing sample_step and
/// sample_calibration, which lets tests replay scripted outcomes.
template <class Worker, class Rec>
RegretTrajectory run_schedule(Worker& worker, Rec& rec, std::span<const ArmParams> arms,
                              std::uint64_t horizon, double beta,
                              bool calibration_in_ybar = false) {
  const double best = best_arm(arms).value;
  for (std::size_t k = 0; k < arms.size(); ++k)
    rec.calibrate(k, worker.sample_calibration(k), calibration_in_ybar);

  RegretTrajectory traj(horizon);
  for (std::uint64_t t = 0; t < horizon; ++t) {
    const Action a = rec.next();
    const std::uint64_t g = rec.stats()[a.arm].gold_completed;
    const StepOutcome outcome = worker.sample_step(a.arm);
    traj.accumulate(a, arms[a.arm], best, g, beta, outcome);
    rec.observe(a, outcome);
  }
  return traj;
}

template <class Worker>
RegretTrajectory run_schedule(Worker& worker, Recommender& rec, std::span<const ArmParams> arms,
                              std::uint64_t horizon, double beta,
                              bool calibration_in_ybar = false) {
  return std::visit(
      [&](auto& r) { return run_schedule(worker, r, arms, horizon, beta, calibration_in_ybar); },
      rec);
}

/// Seeds of one trial: the worker uses derive_seed(master, label, trial), the
/// strategy a SplitMix64 of that seed xor kStrategyStream.
struct TrialSeeds {
  std::uint64_t worker;
  std::uint64_t strategy;
};

inline TrialSeeds trial_seeds(std::uint64_t master, const std::string& label,
                              std::uint64_t trial) {
  const std::uint64_t w = derive_seed(master, label, trial);
  return {w, splitmix64(w ^ kStrategyStream)};
}

inline RegretTrajectory run_trial(const ExperimentSpec& spec, const StrategyConfig& strategy,
                                  std::uint64_t trial_index) {
  const auto arms = spec.resolved_arms();
  const auto seeds = trial_seeds(spec.master_seed, strategy.resolved_label(), trial_index);
  WorkerModel worker(arms, seeds.worker);
  Recommender rec = make_recommender(strategy, arms.size(), spec.horizon, seeds.strategy);
  return run_schedule(worker, rec, arms, spec.horizon, spec.beta, spec.calibration_in_ybar);
}

struct MeanStd {
  double mean = 0.0;
  double std_err = 0.0;
};

/// Trial-averaged curves of one strategy.
struct AggregatedCurve {
  std::string label;
  std::string fingerprint;
  std::uint64_t trials = 0;
  std::vector<std::uint64_t> steps;
  std::vector<MeanStd> regret;           ///< semi-analytic regret
  std::vector<MeanStd> reward;           ///< semi-analytic cumulative reward
  std::vector<MeanStd> realized_regret;  ///< regret from realized rewards
  /// Set when trials == 1; every std_err is then 0.
  bool single_trial = false;

  MeanStd final_regret() const { return regret.back(); }
  MeanStd final_reward() const { return reward.back(); }
  MeanStd final_realized_regret() const { return realized_regret.back(); }
};

/// Welford accumulator. Feeding values in a fixed order gives bit-identical
/// results.
class RunningMoments {
 public:
  void add(double v) noexcept {
    ++n_;
    const double delta = v - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (v - mean_);
  }
  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  MeanStd summary() const noexcept {
    return {mean_, n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0};
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct RunOptions {
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

namespace detail {

/// Calls task(i) for every i in [0, count) on up to `threads` threads. The
/// first exception thrown by any task is rethrown on the caller.
template <class Task>
void parallel_for(std::size_t count, unsigned threads, Task&& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct TrialSample {
  std::vector<double> regret;
  std::vector<double> reward;
  std::vector<double> realized_regret;
};

}  // namespace detail

/// Runs every trial of every strategy and aggregates mean and standard error
/// at each checkpoint. Trials run in blocks; each block is reduced in trial
/// index order, so the result does not depend on the thread count.
inline std::vector<AggregatedCurve> run_experiment(const ExperimentSpec& spec,
                                                   RunOptions options = {}) {
  spec.validate();
  constexpr std::size_t kBlock = 256;
  const auto steps = checkpoint_steps(spec.horizon, spec.checkpoint_stride);
  const std::size_t n_trials = static_cast<std::size_t>(spec.trials);
  const std::string fp = spec.fingerprint();

  std::vector<AggregatedCurve> curves;
  curves.reserve(spec.strategies.size());
  std::vector<detail::TrialSample> block(std::min(kBlock, n_trials));
  for (const StrategyConfig& strategy : spec.strategies) {
    std::vector<RunningMoments> regret(steps.size()), reward(steps.size()),
        realized(steps.size());
    for (std::size_t first = 0; first < n_trials; first += kBlock) {
      const std::size_t count = std::min(kBlock, n_trials - first);
      detail::parallel_for(count, options.threads, [&](std::size_t i) {
        const RegretTrajectory traj = run_trial(spec, strategy, first + i);
        detail::TrialSample& out = block[i];
        out.regret.clear();
        out.reward.clear();
        out.realized_regret.clear();
        for (std::uint64_t step : steps) {
          out.regret.push_back(traj.cumulative_regret()[step - 1]);
          out.reward.push_back(traj.cumulative_reward()[step - 1]);
          out.realized_regret.push_back(traj.cumulative_realized_regret()[step - 1]);
        }
      });
      for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t c = 0; c < steps.size(); ++c) {
          regret[c].add(block[i].regret[c]);
          reward[c].add(block[i].reward[c]);
          realized[c].add(block[i].realized_regret[c]);
        }
      }
    }

    AggregatedCurve curve;
    curve.label = strategy.resolved_label();
    curve.fingerprint = fp;
    curve.trials = spec.trials;
    curve.steps = steps;
    curve.single_trial = spec.trials == 1;
    for (std::size_t c = 0; c < steps.size(); ++c) {
      curve.regret.push_back(regret[c].summary());
      curve.reward.push_back(reward[c].summary());
      curve.realized_regret.push_back(realized[c].summary());
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

/// Points of the default setting-2 sweep: x = y in {0.1, ..., 0.7}.
inline std::vector<std::pair<double, double>> default_sweep_grid() {
  std::vector<std::pair<double, double>> grid;
  for (int i = 1; i <= 7; ++i) grid.emplace_back(i / 10.0, i / 10.0);
  return grid;
}

struct SweepRow {
  double x = 0.0;
  double y = 0.0;
  double min_gap = 0.0;
  /// Arm 2 (x, y) beats arm 1, so min_gap is measured from arm 2.
  bool best_arm_changed = false;
  std::vector<std::pair<std::string, MeanStd>> final_regret;
};

/// Runs `base` under setting 2 at each (x, y) and records the final regret of
/// every strategy together with the smallest gap q*p* - max_{k != *} q_k p_k.
inline std::vector<SweepRow> sweep_gap(const ExperimentSpec& base,
                                       std::span<const std::pair<double, double>> grid,
                                       RunOptions options = {}) {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  std::vector<SweepRow> rows;
  for (const auto& [x, y] : grid) {
    if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
      throw std::invalid_argument("sweep point outside [0,1]^2");
    ExperimentSpec spec = base;
    spec.arms.clear();
    spec.setting = 2;
    spec.x = x;
    spec.y = y;
    const auto arms = spec.resolved_arms();
    SweepRow row{x, y, min_gap(arms), best_arm(arms).index != 0, {}};
    for (const auto& curve : run_experiment(spec, options))
      row.final_regret.emplace_back(curve.label, curve.final_regret());
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Least-squares slope of log(values) against log(horizons).
inline double fit_loglog_slope(std::span<const double> horizons, std::span<const double> values) {
  if (horizons.size() != values.size())
    throw std::invalid_argument("slope fit: size mismatch");
  if (horizons.size() < 3) throw std::invalid_argument("slope fit needs at least 3 horizons");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(horizons.size());
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0.0) || !(values[i] > 0.0))
      throw std::domain_error("slope fit: values must be positive to take logs");
    const double lx = std::log(horizons[i]);
    const double ly = std::log(values[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("slope fit: horizons must differ");
  return (m * sxy - sx * sy) / denom;
}

struct SlopeResult {
  std::vector<std::uint64_t> horizons;
  std::vector<MeanStd> final_regret;
  double slope = 0.0;
};

/// Runs `strategy` to completion at each horizon and fits the log-log slope
/// of mean final regret.
inline SlopeResult slope_estimate(const StrategyConfig& strategy, const ExperimentSpec& base,
                                  std::span<const std::uint64_t> horizons,
                                  RunOptions options = {}) {
  if (horizons.size() < 3) throw std::invalid_argument("slope estimate needs at least 3 horizons");
  SlopeResult result;
  std::vector<double> xs, ys;
  for (std::uint64_t n : horizons) {
    ExperimentSpec spec = base;
    spec.strategies = {strategy};
    spec.horizon = n;
    spec.checkpoint_stride = n;
    const MeanStd fin = run_experiment(spec, options).front().final_regret();
    result.horizons.push_back(n);
    result.final_regret.push_back(fin);
    xs.push_back(static_cast<double>(n));
    ys.push_back(fin.mean);
  }
  result.slope = fit_loglog_slope(xs, ys);
  return result;
}

}  // namespace goldband
