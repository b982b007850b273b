#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "goldband/config.hpp"
#include "goldband/csv.hpp"

using namespace goldband;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("goldband_cfg_" + name)).string();
}

AggregatedCurve curve(const std::string& label, std::vector<std::uint64_t> steps) {
  AggregatedCurve c;
  c.label = label;
  c.steps = steps;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    c.regret.push_back({0.1 * static_cast<double>(i + 1), 0.01});
    c.reward.push_back({1.0 / 3.0, 0.0});
    c.realized_regret.push_back({0.0, 0.0});
  }
  return c;
}

}  // namespace

TEST(Config, ArmsBothForms) {
  const auto arms = arms_from_json(nlohmann::json::parse(
      R"([{"reliability": 0.7, "preference": 0.6}, [0.2, 0.9]])"));
  ASSERT_EQ(arms.size(), 2u);
  EXPECT_EQ(arms[0], ArmParams(0.7, 0.6));
  EXPECT_EQ(arms[1], ArmParams(0.2, 0.9));
  EXPECT_THROW(arms_from_json(nlohmann::json::parse(R"([[1.5, 0.2]])")), ConfigError);
  EXPECT_THROW(arms_from_json(nlohmann::json::parse(R"([{"reliability": 0.5}])")), ConfigError);
  EXPECT_THROW(arms_from_json(nlohmann::json::parse(R"([{"p": 0.5, "q": 0.5}])")), ConfigError);
  EXPECT_THROW(arms_from_json(nlohmann::json::parse(R"({"a": 1})")), ConfigError);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"({"trails": 10})")), ConfigError);
  EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"({"strategies": [{"kind": "gr", "eps": 1}]})")),
               ConfigError);
  EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"({"strategies": [{"kind": "ucb"}]})")),
               ConfigError);
  EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"({"trials": "many"})")), ConfigError);
}

TEST(Config, RoundTripProperty) {
  Rng rng(2718);
  for (int i = 0; i < 300; ++i) {
    ExperimentSpec spec;
    if (rng.bernoulli(0.5)) {
      spec.setting = 1 + static_cast<int>(rng.index(5));
      if (*spec.setting == 2) spec.x = rng.uniform(), spec.y = rng.uniform();
    } else {
      for (std::size_t k = 0, n = 1 + rng.index(6); k < n; ++k)
        spec.arms.emplace_back(rng.uniform(), rng.uniform());
    }
    for (std::size_t s = 0, n = 1 + rng.index(4); s < n; ++s) {
      StrategyConfig c;
      c.kind = static_cast<StrategyKind>(rng.index(4));
      c.mode = static_cast<SelectionMode>(rng.index(3));
      c.alpha = 0.01 + rng.uniform();
      c.gamma = 1.0 + 9.0 * rng.uniform();
      c.c = 1e-3 + rng.uniform();
      c.d = 0.01 + 0.99 * rng.uniform();
      c.explore_fraction = 0.01 + 0.98 * rng.uniform();
      if (rng.bernoulli(0.3)) c.exploration_per_arm = 1 + rng.index(5);
      c.label = "s" + std::to_string(s);
      spec.strategies.push_back(c);
    }
    spec.trials = 1 + rng.index(5000);
    spec.horizon = 1 + rng.index(100000);
    spec.beta = 20.0 * rng.uniform();
    spec.master_seed = static_cast<std::uint64_t>(rng.uniform() * 1e18);
    spec.checkpoint_stride = 1 + rng.index(100);
    spec.calibration_in_ybar = rng.bernoulli(0.5);
    const auto text = spec_to_json(spec).dump();
    ASSERT_EQ(spec_from_json(nlohmann::json::parse(text)), spec) << text;
  }
}

TEST(Csv, HeaderRowsAndFormat) {
  std::vector<AggregatedCurve> one{curve("gr", {1, 2, 3})};
  std::ostringstream out;
  write_curves_csv(out, one);
  EXPECT_EQ(out.str(),
            "step,strategy,mean_regret,std_err\n"
            "1,gr,0.1,0.01\n"
            "2,gr,0.2,0.01\n"
            "3,gr,0.3,0.01\n");
  std::ostringstream reward;
  write_curves_csv(reward, one, CurveColumn::Reward);
  EXPECT_EQ(reward.str().substr(0, reward.str().find('\n')), "step,strategy,mean_reward,std_err");
  EXPECT_NE(reward.str().find("0.333333333"), std::string::npos);
}

TEST(Csv, InterleavedSortedByStepThenLabel) {
  std::vector<AggregatedCurve> two{curve("ur", {5, 10}), curve("eps-first", {5, 10})};
  std::ostringstream out;
  write_curves_csv(out, two);
  std::istringstream in(out.str());
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l.substr(0, l.find(',', l.find(',') + 1)));
  EXPECT_EQ(lines, (std::vector<std::string>{"step,strategy", "5,eps-first", "5,ur", "10,eps-first",
                                             "10,ur"}));
}

TEST(Csv, Errors) {
  std::ostringstream out;
  EXPECT_THROW(write_curves_csv(out, std::vector<AggregatedCurve>{}), std::invalid_argument);
  EXPECT_THROW(write_sweep_csv(out, std::vector<SweepRow>{}), std::invalid_argument);
  std::vector<AggregatedCurve> one{curve("gr", {1})};
  EXPECT_THROW(emit_csv(one, "/nonexistent-dir/x/out.csv"), std::runtime_error);
}

TEST(Csv, EmitIsByteStable) {
  std::vector<AggregatedCurve> one{curve("gr", {1, 2})};
  const auto a = temp_path("a.csv"), b = temp_path("b.csv");
  emit_csv(one, a);
  emit_csv(one, b);
  std::ifstream fa(a), fb(b);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_FALSE(std::filesystem::exists(a + ".tmp"));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Csv, SweepFormat) {
  SweepRow row{0.4, 0.4, 0.33, false, {{"ur", {12.5, 0.25}}, {"gr", {10.0, 0.5}}}};
  std::ostringstream out;
  write_sweep_csv(out, std::vector<SweepRow>{row});
  EXPECT_EQ(out.str(),
            "x,y,min_gap,strategy,final_mean_regret,std_err\n"
            "0.4,0.4,0.33,gr,10,0.5\n"
            "0.4,0.4,0.33,ur,12.5,0.25\n");
}

TEST(Csv, NineSignificantDigits) {
  EXPECT_EQ(format_float(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_float(22.734347415216977), "22.7343474");
  EXPECT_EQ(format_float(0.0), "0");
}
