#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "goldband/harness.hpp"

namespace goldband {

/// %.9g; always '.' as the decimal separator (snprintf in the "C" locale).
inline std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

enum class CurveColumn { Regret, Reward };

/// `step,strategy,mean_regret,std_err` (or mean_reward), one row per
/// (checkpoint, strategy), sorted by step then label.
inline void write_curves_csv(std::ostream& out, std::span<const AggregatedCurve> curves,
                             CurveColumn column = CurveColumn::Regret) {
  if (curves.empty()) throw std::invalid_argument("no curves to write");
  struct Row {
    std::uint64_t step;
    const std::string* label;
    MeanStd value;
  };
  std::vector<Row> rows;
  for (const auto& c : curves) {
    const auto& values = column == CurveColumn::Regret ? c.regret : c.reward;
    for (std::size_t i = 0; i < c.steps.size(); ++i) rows.push_back({c.steps[i], &c.label, values[i]});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.step, *a.label) < std::tie(b.step, *b.label);
  });
  out << (column == CurveColumn::Regret ? "step,strategy,mean_regret,std_err\n"
                                        : "step,strategy,mean_reward,std_err\n");
  for (const auto& r : rows)
    out << r.step << ',' << *r.label << ',' << format_float(r.value.mean) << ','
        << format_float(r.value.std_err) << '\n';
}

/// `x,y,min_gap,strategy,final_mean_regret,std_err`, grid order then label.
inline void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  if (rows.empty()) throw std::invalid_argument("no sweep rows to write");
  out << "x,y,min_gap,strategy,final_mean_regret,std_err\n";
  for (const auto& row : rows) {
    auto entries = row.final_regret;
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [label, v] : entries)
      out << format_float(row.x) << ',' << format_float(row.y) << ',' << format_float(row.min_gap)
          << ',' << label << ',' << format_float(v.mean) << ',' << format_float(v.std_err) << '\n';
  }
}

/// Writes `content` to `path` through a sibling temporary file and a rename,
/// so a failed run never leaves a partial file behind.
inline void write_file_atomically(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("cannot write '" + path + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot write '" + path + "': " + ec.message());
  }
}

inline void emit_csv(std::span<const AggregatedCurve> curves, const std::string& path,
                     CurveColumn column = CurveColumn::Regret) {
  std::ostringstream buf;
  write_curves_csv(buf, curves, column);
  write_file_atomically(path, buf.str());
}

inline void emit_sweep_csv(std::span<const SweepRow> rows, const std::string& path) {
  std::ostringstream buf;
  write_sweep_csv(buf, rows);
  write_file_atomically(path, buf.str());
}

}  // namespace goldband
