#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "goldband/bandit_core.hpp"

namespace goldband {

namespace detail {

/// ceil(x), except that values within 1e-9 (relative) of an integer snap to
/// it. alpha * r^gamma is computed in floating point and 0.1 * 900 must give
/// 90, not 91.
inline std::uint64_t snapped_ceil(double x) {
  constexpr double kCap = 0x1.0p62;
  if (!(x < kCap)) return static_cast<std::uint64_t>(kCap);
  if (x <= 0.0) return 0;
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, nearest))
    return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(x));
}

}  // namespace detail

/// Epoch growth tau(r) = ceil(alpha * r^gamma).
class EpochSchedule {
 public:
  EpochSchedule() = default;
  EpochSchedule(double alpha, double gamma) : alpha_(alpha), gamma_(gamma) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw std::invalid_argument("alpha must be positive, got " + std::to_string(alpha));
    if (!(gamma >= 1.0) || !std::isfinite(gamma))
      throw std::invalid_argument("gamma must be >= 1, got " + std::to_string(gamma));
  }

  double alpha() const noexcept { return alpha_; }
  double gamma() const noexcept { return gamma_; }

  friend bool operator==(const EpochSchedule&, const EpochSchedule&) = default;

 private:
  double alpha_ = 0.1;
  double gamma_ = 2.0;
};

/// tau(0) = 0 so that tau(r) - tau(r-1) is defined for r = 1. Saturates at
/// 2^62 for schedules that outgrow any horizon.
inline std::uint64_t tau(std::uint64_t r, const EpochSchedule& s) {
  if (r == 0) return 0;
  return detail::snapped_ceil(s.alpha() * std::pow(static_cast<double>(r), s.gamma()));
}

/// Number of non-gold steps in epoch r: tau(r) - tau(r-1).
inline std::uint64_t tau_increment(std::uint64_t r, const EpochSchedule& s) {
  return tau(r, s) - tau(r - 1, s);
}

struct GRConfig {
  EpochSchedule schedule{};
  double c = 0.05;
  double d = 0.1;

  void validate() const {
    if (!(c > 0.0) || !std::isfinite(c))
      throw std::invalid_argument("GR: c must be positive, got " + std::to_string(c));
    if (!(d > 0.0 && d <= 1.0))
      throw std::invalid_argument("GR: d must lie in (0,1], got " + std::to_string(d));
  }
};

/// Exploration probability of GR at epoch r: min{1, cK/(d^2 r)}.
inline double epsilon_r(std::uint64_t r, std::size_t arm_count, const GRConfig& cfg) {
  if (r == 0) throw std::invalid_argument("epsilon_r: r must be >= 1");
  const double e = cfg.c * static_cast<double>(arm_count) /
                   (cfg.d * cfg.d * static_cast<double>(r));
  return std::min(1.0, e);
}

inline std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

struct EpsFirstConfig {
  std::uint64_t horizon = 1000;
  std::uint64_t exploration_per_arm = 31;

  /// H = floor(sqrt(n)).
  static EpsFirstConfig for_horizon(std::uint64_t n) { return {n, isqrt(n)}; }

  void validate(std::size_t arm_count) const {
    if (horizon == 0) throw std::invalid_argument("eps-first: horizon must be positive");
    if (exploration_per_arm == 0)
      throw std::invalid_argument("eps-first: exploration per arm must be positive");
    if (arm_count * exploration_per_arm > horizon)
      throw std::invalid_argument("eps-first: K*H = " +
                                  std::to_string(arm_count * exploration_per_arm) +
                                  " exceeds horizon " + std::to_string(horizon));
  }
};

struct HybridConfig {
  EpochSchedule schedule{};
  double explore_fraction = 0.1;

  void validate() const {
    if (!(explore_fraction > 0.0 && explore_fraction < 1.0))
      throw std::invalid_argument("hybrid: explore fraction must lie in (0,1), got " +
                                  std::to_string(explore_fraction));
  }
};

/// Gold steps in a hybrid epoch of `length` steps: max(K, ceil(f * length)).
inline std::uint64_t hybrid_gold_steps(std::uint64_t length, std::size_t arm_count,
                                       double explore_fraction) {
  const auto frac = detail::snapped_ceil(explore_fraction * static_cast<double>(length));
  return std::max<std::uint64_t>(arm_count, frac);
}

/// Statistic used to pick the empirical best arm.
enum class SelectionMode : std::uint8_t {
  Full,             ///< argmax of y_bar (acceptance and correctness)
  PreferenceOnly,   ///< argmax of the gold acceptance rate
  ReliabilityOnly,  ///< argmax of x_bar
};

inline std::string_view to_string(SelectionMode m) {
  switch (m) {
    case SelectionMode::Full: return "full";
    case SelectionMode::PreferenceOnly: return "pref-only";
    case SelectionMode::ReliabilityOnly: return "rel-only";
  }
  return "full";
}

inline SelectionMode parse_selection_mode(std::string_view s) {
  if (s == "full") return SelectionMode::Full;
  if (s == "pref-only") return SelectionMode::PreferenceOnly;
  if (s == "rel-only") return SelectionMode::ReliabilityOnly;
  throw std::invalid_argument("unknown selection mode '" + std::string(s) +
                              "' (expected full | pref-only | rel-only)");
}

inline double selection_statistic(const ArmStats& s, SelectionMode mode) {
  switch (mode) {
    case SelectionMode::Full: return y_bar(s);
    case SelectionMode::PreferenceOnly: return acceptance_rate(s);
    case SelectionMode::ReliabilityOnly: return x_bar(s);
  }
  return y_bar(s);
}

inline std::size_t select_empirical_best(std::span<const ArmStats> stats, SelectionMode mode) {
  if (stats.empty()) throw std::invalid_argument("select_empirical_best: no arms");
  std::vector<double> values;
  values.reserve(stats.size());
  for (const ArmStats& s : stats) values.push_back(selection_statistic(s, mode));
  return argmax_lowest(values);
}

}  // namespace goldband
