// goldband: command-line front end for the simulation harness.
//
// Exit status: 0 success, 2 bad arguments or config, 1 runtime failure.
// Output files are only written once every result has been computed.

#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "goldband/cli.hpp"
#include "goldband/csv.hpp"
#include "goldband/goldband.hpp"

namespace {

using namespace goldband;

unsigned threads_from_env() {
  const char* raw = std::getenv("GOLDBAND_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(raw, &end, 10);
  if (*end != '\0' || v > 4096) throw UsageError(std::string("GOLDBAND_THREADS: bad value '") + raw + "'");
  return static_cast<unsigned>(v);
}

struct Output {
  std::string main;
  std::string reward;
};

void warn_single_trial(const std::vector<AggregatedCurve>& curves) {
  for (const auto& c : curves)
    if (c.single_trial) {
      std::cerr << "warning: a single trial per strategy, std_err reported as 0\n";
      return;
    }
}

std::string curves_csv(const std::vector<AggregatedCurve>& curves, CurveColumn column) {
  std::ostringstream out;
  write_curves_csv(out, curves, column);
  return out.str();
}

Output run_curves(const std::vector<ExperimentSpec>& specs, bool with_reward, RunOptions opts) {
  std::vector<AggregatedCurve> all;
  for (const auto& spec : specs)
    for (auto& c : run_experiment(spec, opts)) all.push_back(std::move(c));
  warn_single_trial(all);
  Output o{curves_csv(all, CurveColumn::Regret), {}};
  if (with_reward) o.reward = curves_csv(all, CurveColumn::Reward);
  return o;
}

Output run_sweep(const ExperimentSpec& base, const std::vector<std::pair<double, double>>& grid,
                 RunOptions opts) {
  const auto rows = sweep_gap(base, grid, opts);
  std::ostringstream out;
  write_sweep_csv(out, rows);
  return {out.str(), {}};
}

Output run_slope(const CliInvocation& inv, RunOptions opts) {
  std::ostringstream out;
  out << "strategy,horizon,final_mean_regret,std_err,slope\n";
  for (const auto& s : inv.spec.strategies) {
    const SlopeResult r = slope_estimate(s, inv.spec, inv.horizons, opts);
    for (std::size_t i = 0; i < r.horizons.size(); ++i)
      out << s.resolved_label() << ',' << r.horizons[i] << ',' << format_float(r.final_regret[i].mean)
          << ',' << format_float(r.final_regret[i].std_err) << ',' << format_float(r.slope) << '\n';
  }
  return {out.str(), {}};
}

// Prints a comparison report; fails when either estimator is more than
// 3 standard errors from the exact value.
int oracle_check(const ExperimentSpec& spec, RunOptions opts) {
  const auto arms = spec.resolved_arms();
  const auto exact = enumerate_eps_first(spec.horizon, arms, spec.beta);
  const auto curve = run_experiment(spec, opts).front();
  const MeanStd semi = curve.final_regret();
  const MeanStd real = curve.final_realized_regret();
  const double mass_err = std::abs(exact.probability_mass - 1.0);
  const bool semi_ok = std::abs(semi.mean - exact.exact_expected_regret) <= 3.0 * semi.std_err;
  const bool real_ok = std::abs(real.mean - exact.exact_expected_regret) <= 3.0 * real.std_err;
  const bool mass_ok = mass_err <= 1e-12;
  std::cout << "atoms," << exact.outcome_count << "\n"
            << "probability_mass," << format_float(exact.probability_mass) << "\n"
            << "exact_regret," << format_float(exact.exact_expected_regret) << "\n"
            << "harness_regret," << format_float(semi.mean) << ',' << format_float(semi.std_err) << "\n"
            << "realized_regret," << format_float(real.mean) << ',' << format_float(real.std_err) << "\n"
            << "result," << (semi_ok && real_ok && mass_ok ? "agree" : "DISAGREE") << "\n";
  return semi_ok && real_ok && mass_ok ? 0 : 1;
}

void write_outputs(const CliInvocation& inv, const Output& o) {
  if (inv.out)
    write_file_atomically(*inv.out, o.main);
  else
    std::cout << o.main;
  if (inv.reward_out && !o.reward.empty()) {
    try {
      write_file_atomically(*inv.reward_out, o.reward);
    } catch (...) {
      if (inv.out) {
        std::error_code ec;
        std::filesystem::remove(*inv.out, ec);
      }
      throw;
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CliInvocation inv;
  RunOptions opts;
  try {
    inv = parse_and_validate(std::vector<std::string>(argv + 1, argv + argc));
    opts.threads = threads_from_env();
  } catch (const UsageError& e) {
    std::cerr << "goldband: " << e.what() << "\n(run with --help for usage)\n";
    return 2;
  }
  if (inv.help) {
    std::cout << inv.help_text;
    return 0;
  }

  try {
    if (inv.print_config) {
      if (inv.command == Subcommand::Preset) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& s : inv.preset_specs) arr.push_back(spec_to_json(s));
        std::cout << arr.dump(2) << "\n";
      } else {
        std::cout << spec_to_json(inv.spec).dump(2) << "\n";
      }
      return 0;
    }

    Output out;
    switch (inv.command) {
      case Subcommand::Run:
        out = run_curves({inv.spec}, inv.reward_out.has_value(), opts);
        break;
      case Subcommand::Sweep:
        out = run_sweep(inv.spec, inv.grid, opts);
        break;
      case Subcommand::Slope:
        out = run_slope(inv, opts);
        break;
      case Subcommand::OracleCheck:
        return oracle_check(inv.spec, opts);
      case Subcommand::Preset: {
        if (inv.preset_sweep)
          out = run_sweep(inv.spec, inv.grid, opts);
        else
          out = run_curves(inv.preset_specs, inv.reward_out.has_value(), opts);
        if (inv.figure == "7" && !inv.reward_out)
          std::cerr << "note: pass --reward-out to also write cumulative reward curves\n";
        break;
      }
    }
    write_outputs(inv, out);
  } catch (const std::exception& e) {
    std::cerr << "goldband: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
