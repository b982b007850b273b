#include <gtest/gtest.h>

#include <vector>

#include "goldband/schedule.hpp"
#include "goldband/strategies.hpp"

using namespace goldband;

TEST(Tau, Examples) {
  const EpochSchedule s(0.1, 2.0);
  EXPECT_EQ(tau(5, s), 3u);
  EXPECT_EQ(tau(10, s), 10u);
  EXPECT_EQ(tau(3, EpochSchedule(0.1, 1.5)), 1u);
  EXPECT_EQ(tau(0, s), 0u);
  EXPECT_EQ(tau_increment(10, s), 1u);
}

TEST(Tau, SnapsFloatingPointNoise) {
  const EpochSchedule s(0.1, 2.0);
  // 0.1 * 900 is 90.00000000000001 in binary floating point.
  EXPECT_EQ(tau(30, s), 90u);
  EXPECT_EQ(tau(100, s), 1000u);
  EXPECT_EQ(tau(70, s), 490u);
}

TEST(Tau, SaturatesForHugeGamma) {
  const EpochSchedule s(0.1, 10.0);
  EXPECT_EQ(tau(1000000, s), std::uint64_t{1} << 62);
  EXPECT_EQ(tau_increment(1000000, s), 0u);
}

TEST(Tau, NonDecreasing) {
  for (double gamma : {1.0, 1.5, 2.0, 3.0, 10.0})
    for (double alpha : {0.02, 0.1, 2.5}) {
      const EpochSchedule s(alpha, gamma);
      for (std::uint64_t r = 1; r < 3000; ++r) ASSERT_LE(tau(r - 1, s), tau(r, s));
    }
}

TEST(EpochSchedule, Validation) {
  EXPECT_THROW(EpochSchedule(0.0, 2.0), std::invalid_argument);
  EXPECT_THROW(EpochSchedule(-1.0, 2.0), std::invalid_argument);
  EXPECT_THROW(EpochSchedule(0.1, 0.99), std::invalid_argument);
  EXPECT_NO_THROW(EpochSchedule(0.1, 1.0));
}

TEST(EpsilonR, Examples) {
  const GRConfig cfg{};
  EXPECT_NEAR(epsilon_r(100, 10, cfg), 0.5, 1e-12);
  EXPECT_EQ(epsilon_r(1, 10, cfg), 1.0);
  EXPECT_NEAR(epsilon_r(1000, 4, GRConfig{{}, 2.1, 0.5}), 0.0336, 1e-12);
  EXPECT_THROW(epsilon_r(0, 10, cfg), std::invalid_argument);
}

TEST(GRConfig, Validation) {
  EXPECT_THROW((GRConfig{{}, 0.0, 0.1}.validate()), std::invalid_argument);
  EXPECT_THROW((GRConfig{{}, 0.05, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((GRConfig{{}, 0.05, 1.5}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((GRConfig{{}, 0.05, 1.0}.validate()));
}

TEST(EpsFirstConfig, Exploration) {
  EXPECT_EQ(EpsFirstConfig::for_horizon(1000).exploration_per_arm, 31u);
  EXPECT_EQ(EpsFirstConfig::for_horizon(100).exploration_per_arm, 10u);
  EXPECT_EQ(EpsFirstConfig::for_horizon(6).exploration_per_arm, 2u);
  EXPECT_NO_THROW(EpsFirstConfig::for_horizon(100).validate(10));
  EXPECT_THROW(EpsFirstConfig::for_horizon(50).validate(10), std::invalid_argument);
  for (std::uint64_t n = 0; n < 100000; ++n) {
    const auto h = isqrt(n);
    ASSERT_LE(h * h, n);
    ASSERT_GT((h + 1) * (h + 1), n);
  }
}

TEST(Hybrid, GoldSteps) {
  EXPECT_EQ(hybrid_gold_steps(20, 2, 0.1), 2u);
  EXPECT_EQ(hybrid_gold_steps(10, 2, 0.5), 5u);
  EXPECT_EQ(hybrid_gold_steps(3, 5, 0.1), 5u);
  EXPECT_THROW((HybridConfig{{}, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((HybridConfig{{}, 1.0}.validate()), std::invalid_argument);
}

TEST(Selection, ModesAndTies) {
  std::vector<ArmStats> stats(3);
  const std::vector<std::pair<int, int>> yx{{4, 10}, {5, 10}, {5, 10}};
  for (std::size_t k = 0; k < 3; ++k) {
    stats[k].gold_recommended = 10;
    stats[k].sum_y_recommended = static_cast<std::uint64_t>(yx[k].first);
    stats[k].gold_accepted = 10 - k;
    stats[k].gold_completed = 10;
    stats[k].sum_correct_completed = 3 + 3 * k;
  }
  EXPECT_EQ(select_empirical_best(stats, SelectionMode::Full), 1u);
  EXPECT_EQ(select_empirical_best(stats, SelectionMode::PreferenceOnly), 0u);
  EXPECT_EQ(select_empirical_best(stats, SelectionMode::ReliabilityOnly), 2u);
  EXPECT_THROW(select_empirical_best(std::vector<ArmStats>{}, SelectionMode::Full),
               std::invalid_argument);
}

TEST(Selection, ModeNames) {
  for (auto m : {SelectionMode::Full, SelectionMode::PreferenceOnly, SelectionMode::ReliabilityOnly})
    EXPECT_EQ(parse_selection_mode(to_string(m)), m);
  EXPECT_THROW(parse_selection_mode("both"), std::invalid_argument);
}

// Steps in GR epochs 1..r equal tau(r) - tau(K) + r.
TEST(Schedule, GreedyStepCountIdentity) {
  for (std::size_t k : {1u, 3u, 10u, 25u})
    for (double gamma : {1.5, 2.0}) {
      const EpochSchedule s(0.1, gamma);
      std::uint64_t total = 0;
      for (std::uint64_t r = 1; r <= 10000; ++r) {
        total += GreedyRecommender::epoch_length_of(r, k, s);
        if (r >= k) {
          ASSERT_EQ(total, tau(r, s) - tau(k, s) + r) << "K=" << k << " r=" << r;
        }
      }
    }
}
