#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "goldband/oracle.hpp"

using namespace goldband;

namespace {

const std::vector<ArmParams> kTwoArms{ArmParams(0.8, 0.8), ArmParams(0.4, 0.4)};

StrategyConfig eps_first() {
  StrategyConfig c;
  c.kind = StrategyKind::EpsilonFirst;
  return c;
}

}  // namespace

// Reference values from tests/oracles/eps_first_enumeration.py.
TEST(Enumeration, FrozenTwoArmValue) {
  const auto r = enumerate_eps_first(6, kTwoArms, 1.0);
  EXPECT_EQ(r.outcome_count, 324u);
  EXPECT_NEAR(r.probability_mass, 1.0, 1e-12);
  EXPECT_NEAR(r.exact_expected_regret, 2.7104033723733334, 1e-12);
  EXPECT_NEAR(r.exact_expected_reward, 1.1295966276266676, 1e-12);
}

TEST(Enumeration, NoExploitationPhase) {
  const auto r = enumerate_eps_first(4, kTwoArms, 1.0);
  EXPECT_NEAR(r.exact_expected_regret, 4 * 0.64, 1e-12);
  EXPECT_EQ(r.exact_expected_reward, 0.0);
}

TEST(Enumeration, DeterministicWorker) {
  const std::vector<ArmParams> arms{ArmParams(1, 1), ArmParams(1, 1)};
  const auto r = enumerate_eps_first(6, arms, 0.0);
  EXPECT_NEAR(r.exact_expected_reward, 2.0, 1e-12);
  EXPECT_NEAR(r.exact_expected_regret, 4.0, 1e-12);
}

TEST(Enumeration, FrozenThreeArmValue) {
  const std::vector<ArmParams> arms{ArmParams(0.7, 0.7), ArmParams(0.9, 0.3), ArmParams(0.3, 0.9)};
  const auto r = enumerate_eps_first(8, arms, 10.0);
  EXPECT_NEAR(r.probability_mass, 1.0, 1e-12);
  EXPECT_NEAR(r.exact_expected_regret, 3.8740402467006794, 1e-12);
}

TEST(Enumeration, RejectsLargeInstances) {
  EXPECT_THROW(enumerate_eps_first(9, kTwoArms, 1.0), std::invalid_argument);
  EXPECT_THROW(enumerate_eps_first(0, kTwoArms, 1.0), std::invalid_argument);
  const std::vector<ArmParams> four(4, ArmParams(0.5, 0.5));
  EXPECT_THROW(enumerate_eps_first(8, four, 1.0), std::invalid_argument);
  const std::vector<ArmParams> three(3, ArmParams(0.5, 0.5));
  EXPECT_THROW(enumerate_eps_first(5, three, 1.0), std::invalid_argument);  // K*H = 6 > 5
}

// Replaying each atom through the real recommender and accounting gives the
// enumerated conditional regret.
TEST(Enumeration, EveryAtomMatchesHarnessReplay) {
  for (double beta : {0.0, 1.0, 10.0})
    for (std::uint64_t n : {4u, 5u, 6u, 8u}) {
      const double best = best_arm(kTwoArms).value;
      std::uint64_t atoms = 0;
      for_each_eps_first_atom(n, kTwoArms, beta, [&](const EpsFirstAtom& atom) {
        ReplayWorker worker(atom.calibration, atom.exploration);
        EpsilonFirstRecommender rec(2, EpsFirstConfig::for_horizon(n));
        const auto traj = run_schedule(worker, rec, kTwoArms, n, beta);
        ASSERT_NEAR(traj.final_regret(), static_cast<double>(n) * best - atom.reward, 1e-12)
            << "atom " << atom.index;
        if (rec.frozen_arm()) {
          ASSERT_EQ(*rec.frozen_arm(), atom.exploited_arm);
        }
        ++atoms;
      });
      EXPECT_GT(atoms, 0u);
    }
}

TEST(McReference, AgreesWithEnumeration) {
  const auto exact = enumerate_eps_first(6, kTwoArms, 1.0);
  const auto mc = mc_reference(eps_first(), kTwoArms, 6, 100000, 2024, 1.0, {1});
  EXPECT_LE(std::abs(mc.mean - exact.exact_expected_regret), 3 * mc.std_err);

  ExperimentSpec spec;
  spec.arms = kTwoArms;
  spec.strategies = {eps_first()};
  spec.trials = 100000;
  spec.horizon = 6;
  spec.beta = 1.0;
  spec.master_seed = 99;
  const auto semi = run_experiment(spec, {1}).front().final_regret();
  EXPECT_LE(std::abs(semi.mean - exact.exact_expected_regret), 3 * semi.std_err);
}

TEST(McReference, SingleArmZeroBeta) {
  const std::vector<ArmParams> one{ArmParams(0.6, 0.7)};
  const std::uint64_t n = 100;
  // eps-first with K = 1 recommends H = 10 gold tasks.
  ExperimentSpec spec;
  spec.arms = one;
  spec.strategies = {eps_first()};
  spec.trials = 200;
  spec.horizon = n;
  spec.beta = 0.0;
  const auto semi = run_experiment(spec, {1}).front().final_regret();
  EXPECT_NEAR(semi.mean, 10 * 0.42, 1e-9);
  EXPECT_EQ(semi.std_err, 0.0);
  const auto mc = mc_reference(eps_first(), one, n, 20000, 5, 0.0, {1});
  EXPECT_LE(std::abs(mc.mean - 10 * 0.42), 3 * mc.std_err);
}

TEST(McReference, ZeroVarianceArms) {
  const std::vector<ArmParams> arms{ArmParams(1.0, 0.5), ArmParams(0.0, 0.9), ArmParams(1.0, 0.3)};
  const double best = 0.5;
  ExperimentSpec spec;
  spec.arms = arms;
  StrategyConfig gr;
  spec.strategies = {gr};
  spec.trials = 1;
  spec.horizon = 300;
  const auto traj = run_trial(spec, gr, 0);
  double prev = 0.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto& a = traj.actions()[t];
    const double inc = traj.cumulative_regret()[t] - prev;
    prev = traj.cumulative_regret()[t];
    ASSERT_NEAR(inc, a.is_gold() ? best : best - arms[a.arm].product(), 1e-12);
  }
  spec.trials = 20000;
  const auto curve = run_experiment(spec, {1}).front();
  const auto semi = curve.final_regret();
  const auto mc = mc_reference(gr, arms, 300, 20000, 0, 10.0, {1});
  EXPECT_LE(std::abs(mc.mean - semi.mean), 3 * std::hypot(mc.std_err, semi.std_err));
}

TEST(ReplayWorker, RejectsAfterQueue) {
  ReplayWorker w({StepOutcome::accepted_with(true)}, {StepOutcome::accepted_with(false)});
  EXPECT_EQ(w.sample_calibration(0), StepOutcome::accepted_with(true));
  EXPECT_EQ(w.sample_step(0), StepOutcome::accepted_with(false));
  EXPECT_EQ(w.sample_step(0), StepOutcome::rejected());
  EXPECT_THROW(w.sample_calibration(1), std::out_of_range);
}
