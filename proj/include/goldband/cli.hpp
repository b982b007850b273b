#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "goldband/config.hpp"
#include "goldband/harness.hpp"
#include "goldband/oracle.hpp"
#include "goldband/strategies.hpp"

namespace goldband {

/// Bad command line or configuration. The CLI maps it to exit status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Subcommand { Run, Sweep, Slope, OracleCheck, Preset };

struct CliInvocation {
  Subcommand command = Subcommand::Run;
  ExperimentSpec spec;
  std::optional<std::string> out;
  std::optional<std::string> reward_out;
  std::string figure;                             ///< preset
  std::vector<ExperimentSpec> preset_specs;       ///< preset, flags applied
  bool preset_sweep = false;
  std::vector<std::pair<double, double>> grid;    ///< sweep
  std::vector<std::uint64_t> horizons;            ///< slope
  bool print_config = false;
  bool help = false;
  std::string help_text;
};

// --- presets -----------------------------------------------------------------

struct PresetPlan {
  std::string figure;
  /// Curve experiments; for the sweep preset a single template spec.
  std::vector<ExperimentSpec> specs;
  bool is_sweep = false;
  std::vector<std::pair<double, double>> grid;
  /// Also report cumulative reward curves.
  bool wants_reward = false;
};

namespace detail {

inline StrategyConfig strategy(StrategyKind kind) {
  StrategyConfig s;
  s.kind = kind;
  return s;
}

inline StrategyConfig ur_gamma(double gamma) {
  StrategyConfig s = strategy(StrategyKind::Uniform);
  s.gamma = gamma;
  return s;
}

inline ExperimentSpec setting_spec(int setting, std::vector<StrategyConfig> strategies) {
  ExperimentSpec spec;
  spec.setting = setting;
  spec.strategies = std::move(strategies);
  return spec;
}

/// Prefixes labels with "s<setting>/" so curves from several settings can
/// share one CSV.
inline void prefix_labels(ExperimentSpec& spec) {
  for (auto& s : spec.strategies) {
    const std::string base = s.resolved_label();
    s.label = "s" + std::to_string(*spec.setting) + "/" + base;
  }
}

}  // namespace detail

/// Experiment(s) behind each figure key: 1, 2, 3, 4gr, 4ur, 5, 7.
inline PresetPlan preset(std::string_view figure) {
  using detail::strategy;
  PresetPlan plan;
  plan.figure = std::string(figure);
  const auto gr = strategy(StrategyKind::Greedy);
  const auto ur = strategy(StrategyKind::Uniform);
  const auto eps = strategy(StrategyKind::EpsilonFirst);

  if (figure == "1") {
    plan.specs.push_back(detail::setting_spec(
        1, {gr, ur, detail::ur_gamma(1.5), detail::ur_gamma(10.0), eps}));
  } else if (figure == "2") {
    plan.specs.push_back(detail::setting_spec(
        1, {detail::ur_gamma(1.5), detail::ur_gamma(2.0), detail::ur_gamma(10.0)}));
  } else if (figure == "3") {
    for (int setting : {3, 4, 5}) {
      auto spec = detail::setting_spec(setting, {gr, ur});
      detail::prefix_labels(spec);
      plan.specs.push_back(std::move(spec));
    }
  } else if (figure == "4gr" || figure == "4ur") {
    const auto kind = figure == "4gr" ? StrategyKind::Greedy : StrategyKind::Uniform;
    for (int setting : {1, 3}) {
      std::vector<StrategyConfig> list;
      for (double alpha : {0.02, 0.1, 0.5, 2.5}) {
        auto s = strategy(kind);
        s.alpha = alpha;
        list.push_back(s);
      }
      auto spec = detail::setting_spec(setting, std::move(list));
      detail::prefix_labels(spec);
      plan.specs.push_back(std::move(spec));
    }
  } else if (figure == "5") {
    ExperimentSpec spec;
    spec.strategies = {gr, ur, eps};
    spec.checkpoint_stride = 50;
    plan.specs.push_back(std::move(spec));
    plan.is_sweep = true;
    plan.grid = default_sweep_grid();
  } else if (figure == "7") {
    std::vector<StrategyConfig> list;
    for (auto mode : {SelectionMode::Full, SelectionMode::PreferenceOnly,
                      SelectionMode::ReliabilityOnly}) {
      for (auto s : {gr, ur, eps}) {
        s.mode = mode;
        list.push_back(s);
      }
    }
    plan.specs.push_back(detail::setting_spec(1, std::move(list)));
    plan.wants_reward = true;
  } else {
    throw UsageError("unknown figure '" + std::string(figure) +
                     "' (expected 1 | 2 | 3 | 4gr | 4ur | 5 | 7)");
  }
  return plan;
}

// --- parsing -----------------------------------------------------------------

namespace detail {

struct FlagValues {
  int setting = 0;
  std::string arms_file;
  double x = 0, y = 0;
  std::vector<std::string> strategies;
  double gamma = 2.0, alpha = 0.1, beta = 10.0, c = 0.05, d = 0.1, explore_fraction = 0.1;
  std::vector<std::string> modes;
  std::uint64_t trials = 0, horizon = 0, seed = 0, stride = 1;
  std::string out, reward_out, config, figure, grid;
  std::vector<std::uint64_t> horizons;
  bool print_config = false;
};

inline void add_common(CLI::App* sub, FlagValues& f) {
  sub->add_option("--setting", f.setting, "Builtin worker setting 1-5");
  sub->add_option("--arms-file", f.arms_file, "JSON array of {reliability, preference}");
  sub->add_option("--x", f.x, "Reliability of arm 2 in setting 2");
  sub->add_option("--y", f.y, "Preference of arm 2 in setting 2");
  sub->add_option("--strategy", f.strategies, "gr | ur | ur-gamma | eps-first | hybrid (repeatable)");
  sub->add_option("--gamma", f.gamma, "Epoch growth exponent for ur-gamma");
  sub->add_option("--alpha", f.alpha, "Epoch scale alpha (default 0.1)");
  sub->add_option("--beta", f.beta, "Variance penalty weight (default 10)");
  sub->add_option("--c", f.c, "GR exploration constant (default 0.05)");
  sub->add_option("--d", f.d, "GR gap parameter (default 0.1)");
  sub->add_option("--explore-fraction", f.explore_fraction, "Hybrid gold fraction (default 0.1)");
  sub->add_option("--mode", f.modes, "full | pref-only | rel-only (repeatable)");
  sub->add_option("--trials", f.trials, "Trials per strategy (default 2000)");
  sub->add_option("--horizon", f.horizon, "Steps per trial (default 1000)");
  sub->add_option("--seed", f.seed, "Master seed");
  sub->add_option("--stride", f.stride, "Checkpoint stride (default 1)");
  sub->add_option("--out", f.out, "Output CSV path (stdout when absent)");
  sub->add_option("--config", f.config, "JSON config; explicit flags override it");
  sub->add_flag("--print-config", f.print_config, "Print the resolved config as JSON and exit");
}

inline bool given(const CLI::App* sub, const char* flag) {
  const CLI::Option* opt = sub->get_option_no_throw(flag);
  return opt != nullptr && opt->count() > 0;
}

inline std::vector<std::pair<double, double>> parse_grid(const std::string& text) {
  std::vector<std::pair<double, double>> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("--grid: expected x:y pairs, got '" + item + "'");
    try {
      grid.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw UsageError("--grid: cannot parse '" + item + "'");
    }
  }
  if (grid.empty()) throw UsageError("--grid: no points");
  for (const auto& [x, y] : grid)
    if (!(x >= 0 && x <= 1 && y >= 0 && y <= 1)) throw UsageError("--grid: points must lie in [0,1]^2");
  return grid;
}

inline void check_probability(const char* flag, double v) {
  if (!(v >= 0.0 && v <= 1.0))
    throw UsageError(std::string(flag) + " must lie in [0,1], got " + std::to_string(v));
}

/// Applies explicit flags on top of `spec` (defaults or a loaded config).
inline void apply_flags(ExperimentSpec& spec, const CLI::App* sub, const FlagValues& f) {
  if (given(sub, "--setting") && given(sub, "--arms-file"))
    throw UsageError("--setting and --arms-file are mutually exclusive");
  if (given(sub, "--setting")) {
    spec.setting = f.setting;
    spec.arms.clear();
  }
  if (given(sub, "--arms-file")) {
    spec.arms = load_arms_file(f.arms_file);
    spec.setting.reset();
  }
  if (given(sub, "--x")) check_probability("--x", f.x), spec.x = f.x;
  if (given(sub, "--y")) check_probability("--y", f.y), spec.y = f.y;
  if (spec.setting == 2 && (!spec.x || !spec.y)) {
    std::string missing = !spec.x && !spec.y ? "--x and --y" : !spec.x ? "--x" : "--y";
    throw UsageError("setting 2 requires " + missing);
  }
  if (given(sub, "--trials")) spec.trials = f.trials;
  if (given(sub, "--horizon")) spec.horizon = f.horizon;
  if (given(sub, "--seed")) spec.master_seed = f.seed;
  if (given(sub, "--stride")) spec.checkpoint_stride = f.stride;
  if (given(sub, "--beta")) spec.beta = f.beta;

  if (given(sub, "--strategy")) {
    spec.strategies.clear();
    bool has_ur_gamma = false;
    for (const auto& name : f.strategies) {
      StrategyConfig s;
      try {
        s.kind = parse_strategy_kind(name);
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--strategy: ") + e.what());
      }
      if (name == "ur-gamma") {
        s.gamma = f.gamma;
        has_ur_gamma = true;
      }
      spec.strategies.push_back(s);
    }
    if (given(sub, "--gamma") && !has_ur_gamma)
      throw UsageError("--gamma only applies to --strategy ur-gamma");
  } else if (given(sub, "--gamma")) {
    for (auto& s : spec.strategies)
      if (s.kind == StrategyKind::Uniform) s.gamma = f.gamma;
  }
  for (auto& s : spec.strategies) {
    if (given(sub, "--alpha")) s.alpha = f.alpha;
    if (given(sub, "--c")) s.c = f.c;
    if (given(sub, "--d")) s.d = f.d;
    if (given(sub, "--explore-fraction")) s.explore_fraction = f.explore_fraction;
  }
  if (given(sub, "--mode")) {
    std::vector<StrategyConfig> crossed;
    for (const auto& name : f.modes) {
      SelectionMode mode;
      try {
        mode = parse_selection_mode(name);
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--mode: ") + e.what());
      }
      for (auto s : spec.strategies) {
        s.mode = mode;
        crossed.push_back(s);
      }
    }
    spec.strategies = std::move(crossed);
  }
}

inline void validate_spec(const ExperimentSpec& spec) {
  try {
    spec.validate();
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
}

inline std::vector<StrategyConfig> default_comparison() {
  return {strategy(StrategyKind::Greedy), strategy(StrategyKind::Uniform),
          strategy(StrategyKind::EpsilonFirst)};
}

}  // namespace detail

/// Parses and fully validates a command line (without the program name).
/// Throws UsageError naming the offending flag; sets `help` instead when
/// --help was requested.
inline CliInvocation parse_and_validate(const std::vector<std::string>& args) {
  CLI::App app{"Gold-task bandit strategies for crowdsourcing task recommendation", "goldband"};
  app.require_subcommand(1);
  detail::FlagValues f;

  auto* run = app.add_subcommand("run", "Run strategies on one worker and write regret curves");
  auto* sweep = app.add_subcommand("sweep", "Vary arm 2 of setting 2 and record final regret");
  auto* slope = app.add_subcommand("slope", "Fit the log-log slope of final regret vs horizon");
  auto* oracle = app.add_subcommand("oracle-check",
                                    "Compare the harness with exact enumeration on a tiny instance");
  auto* pre = app.add_subcommand("preset", "Run the experiment behind one figure");
  for (auto* sub : {run, sweep, slope, oracle, pre}) detail::add_common(sub, f);
  sweep->add_option("--grid", f.grid, "x:y points, comma separated (default x=y=0.1..0.7)");
  run->add_option("--reward-out", f.reward_out, "Also write cumulative reward curves here");
  pre->add_option("--reward-out", f.reward_out, "Also write cumulative reward curves here");
  pre->add_option("--figure", f.figure, "1 | 2 | 3 | 4gr | 4ur | 5 | 7")->required();
  slope->add_option("--horizons", f.horizons, "Comma separated horizons (default 250,1000,4000)")
      ->delimiter(',');

  std::vector<std::string> argv_store{"goldband"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  CliInvocation inv;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    inv.help = true;
    const auto subs = app.get_subcommands();
    inv.help_text = subs.empty() ? app.help() : subs.front()->help();
    return inv;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  inv.command = name == "run"            ? Subcommand::Run
                : name == "sweep"        ? Subcommand::Sweep
                : name == "slope"        ? Subcommand::Slope
                : name == "oracle-check" ? Subcommand::OracleCheck
                                         : Subcommand::Preset;
  if (detail::given(sub, "--out")) inv.out = f.out;
  if (detail::given(sub, "--reward-out")) inv.reward_out = f.reward_out;
  inv.print_config = f.print_config;

  try {
    if (inv.command == Subcommand::Preset) {
      for (const char* flag : {"--setting", "--arms-file", "--x", "--y", "--strategy", "--mode",
                               "--config", "--gamma", "--alpha", "--c", "--d",
                               "--explore-fraction"})
        if (detail::given(sub, flag))
          throw UsageError(std::string(flag) + " cannot be combined with preset");
      PresetPlan plan = preset(f.figure);
      inv.figure = f.figure;
      for (auto& spec : plan.specs) {
        detail::apply_flags(spec, sub, f);
        if (!plan.is_sweep) detail::validate_spec(spec);
      }
      if (plan.is_sweep) {
        for (const auto& [x, y] : plan.grid) {
          ExperimentSpec probe = plan.specs.front();
          probe.setting = 2, probe.x = x, probe.y = y;
          detail::validate_spec(probe);
        }
        inv.grid = plan.grid;
      }
      inv.spec = plan.specs.front();
      inv.preset_specs = std::move(plan.specs);
      inv.preset_sweep = plan.is_sweep;
      return inv;
    }

    ExperimentSpec spec = detail::given(sub, "--config") ? load_config_file(f.config) : ExperimentSpec{};

    switch (inv.command) {
      case Subcommand::Sweep: {
        if (detail::given(sub, "--arms-file") ||
            (detail::given(sub, "--setting") && f.setting != 2))
          throw UsageError("sweep always uses setting 2");
        if (detail::given(sub, "--x") || detail::given(sub, "--y"))
          throw UsageError("sweep takes its (x, y) points from --grid");
        detail::apply_flags(spec, sub, f);
        if (spec.strategies.empty()) spec.strategies = detail::default_comparison();
        inv.grid = detail::given(sub, "--grid") ? detail::parse_grid(f.grid) : default_sweep_grid();
        spec.arms.clear();
        for (const auto& [x, y] : inv.grid) {
          ExperimentSpec probe = spec;
          probe.setting = 2, probe.x = x, probe.y = y;
          detail::validate_spec(probe);
        }
        spec.setting.reset(), spec.x.reset(), spec.y.reset();
        break;
      }
      case Subcommand::Slope: {
        detail::apply_flags(spec, sub, f);
        inv.horizons = detail::given(sub, "--horizons") ? f.horizons
                                                        : std::vector<std::uint64_t>{250, 1000, 4000};
        if (inv.horizons.size() < 3) throw UsageError("--horizons needs at least 3 values");
        for (std::uint64_t n : inv.horizons) {
          ExperimentSpec probe = spec;
          probe.horizon = n;
          detail::validate_spec(probe);
        }
        break;
      }
      case Subcommand::OracleCheck: {
        if (!detail::given(sub, "--config")) {
          spec.arms = {ArmParams(0.8, 0.8), ArmParams(0.4, 0.4)};
          spec.horizon = 6;
          spec.trials = 100000;
          spec.beta = 1.0;
        }
        if (detail::given(sub, "--strategy"))
          for (const auto& s : f.strategies)
            if (s != "eps-first") throw UsageError("oracle-check only supports --strategy eps-first");
        if (detail::given(sub, "--mode")) throw UsageError("oracle-check enumerates full mode only");
        detail::apply_flags(spec, sub, f);
        spec.strategies = {detail::strategy(StrategyKind::EpsilonFirst)};
        if (spec.trials < 2) throw UsageError("--trials must be >= 2 for oracle-check");
        detail::validate_spec(spec);
        const auto arms = spec.resolved_arms();
        if (spec.horizon > 8 || arms.size() > 3)
          throw UsageError("oracle-check needs --horizon <= 8 and at most 3 arms");
        break;
      }
      default:
        detail::apply_flags(spec, sub, f);
        detail::validate_spec(spec);
        break;
    }
    inv.spec = std::move(spec);
  } catch (const UsageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return inv;
}

}  // namespace goldband
