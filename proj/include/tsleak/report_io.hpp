#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsleak/audit.hpp"
#include "tsleak/config.hpp"
#include "tsleak/detail/text.hpp"
#include "tsleak/error.hpp"
#include "tsleak/metrics.hpp"
#include "tsleak/runner.hpp"

namespace tsleak {

enum class ReportFormat { csv, json };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw ConfigError("unknown report format '" + std::string(s) + "'");
}

inline SplitPlan parse_plan_label(std::string_view s) {
  if (auto plan = plan_from_label(s)) return *plan;
  throw DataError("unknown plan label '" + std::string(s) + "'");
}

// ---- JSON ----------------------------------------------------------------

namespace detail {

template <class T>
nlohmann::json opt_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
std::optional<T> opt_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const RunStats& s) {
  j = {{"n_runs", s.n_runs},
       {"min", s.min},
       {"max", s.max},
       {"mean", s.mean},
       {"std", detail::opt_json(s.std_dev)},
       {"stderr", detail::opt_json(s.std_error)},
       {"ci95", s.ci95 ? nlohmann::json::array({s.ci95->low, s.ci95->high}) : nlohmann::json(nullptr)},
       {"mean_optimal_epoch", detail::opt_json(s.mean_optimal_epoch)},
       {"mean_last_epoch", detail::opt_json(s.mean_last_epoch)}};
}

inline void from_json(const nlohmann::json& j, RunStats& s) {
  s.n_runs = j.at("n_runs").get<std::size_t>();
  s.min = j.at("min").get<double>();
  s.max = j.at("max").get<double>();
  s.mean = j.at("mean").get<double>();
  s.std_dev = detail::opt_from<double>(j, "std");
  s.std_error = detail::opt_from<double>(j, "stderr");
  s.ci95.reset();
  if (!j.at("ci95").is_null()) s.ci95 = ConfidenceInterval{j["ci95"][0].get<double>(), j["ci95"][1].get<double>()};
  s.mean_optimal_epoch = detail::opt_from<double>(j, "mean_optimal_epoch");
  s.mean_last_epoch = detail::opt_from<double>(j, "mean_last_epoch");
}

inline void to_json(nlohmann::json& j, const CellKey& k) {
  j = {{"name", k.name}, {"window", k.window}, {"lag", k.lag}, {"plan", k.plan},
       {"mode", to_string(k.mode)}};
}

inline void from_json(const nlohmann::json& j, CellKey& k) {
  k.name = j.at("name").get<std::string>();
  k.window = j.at("window").get<std::size_t>();
  k.lag = j.at("lag").get<std::size_t>();
  k.plan = j.at("plan").get<SplitPlan>();
  k.mode = parse_mode(j.at("mode").get<std::string>());
}

inline void to_json(nlohmann::json& j, const RunRecord& r) {
  j = {{"repetition", r.repetition},
       {"seed", r.seed},
       {"rmse", r.rmse},
       {"fold_rmses", r.fold_rmses},
       {"optimal_epoch", detail::opt_json(r.optimal_epoch)},
       {"last_epoch", detail::opt_json(r.last_epoch)},
       {"max_overlap", r.max_overlap}};
}

inline void from_json(const nlohmann::json& j, RunRecord& r) {
  r.repetition = j.at("repetition").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.rmse = j.at("rmse").get<double>();
  r.fold_rmses = j.at("fold_rmses").get<std::vector<double>>();
  r.optimal_epoch = detail::opt_from<double>(j, "optimal_epoch");
  r.last_epoch = detail::opt_from<double>(j, "last_epoch");
  r.max_overlap = j.at("max_overlap").get<std::size_t>();
}

inline void to_json(nlohmann::json& j, const CellResult& c) {
  j = {{"key", c.key},
       {"runs", c.runs},
       {"stats", detail::opt_json(c.stats)},
       {"audits", c.audits},
       {"max_overlap", c.max_overlap},
       {"error", detail::opt_json(c.error)}};
}

inline void from_json(const nlohmann::json& j, CellResult& c) {
  c.key = j.at("key").get<CellKey>();
  c.runs = j.at("runs").get<std::vector<RunRecord>>();
  c.stats = detail::opt_from<RunStats>(j, "stats");
  c.audits = j.at("audits").get<std::vector<AuditReport>>();
  c.max_overlap = j.at("max_overlap").get<std::size_t>();
  c.error = detail::opt_from<std::string>(j, "error");
}

inline void to_json(nlohmann::json& j, const GainRecord& g) {
  j = {{"name", g.name},
       {"window", g.window},
       {"lag", g.lag},
       {"plan", g.plan},
       {"rmse_clean", g.rmse_clean},
       {"rmse_leaky", g.rmse_leaky},
       {"gain_percent", g.gain_percent},
       {"direction", to_string(g.direction)},
       {"leakage_rank", g.leakage_rank}};
}

inline void from_json(const nlohmann::json& j, GainRecord& g) {
  g.name = j.at("name").get<std::string>();
  g.window = j.at("window").get<std::size_t>();
  g.lag = j.at("lag").get<std::size_t>();
  g.plan = j.at("plan").get<SplitPlan>();
  g.rmse_clean = j.at("rmse_clean").get<double>();
  g.rmse_leaky = j.at("rmse_leaky").get<double>();
  g.gain_percent = j.at("gain_percent").get<double>();
  g.direction = j.at("direction").get<std::string>() == "up" ? Direction::up : Direction::down;
  g.leakage_rank = j.at("leakage_rank").get<std::size_t>();
}

inline nlohmann::json report_json(const ExperimentReport& r) {
  return {{"name", r.name}, {"cells", r.cells}, {"gains", r.gains}, {"provenance", r.provenance}};
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
  try {
    ExperimentReport r;
    r.name = j.at("name").get<std::string>();
    r.cells = j.at("cells").get<std::vector<CellResult>>();
    r.gains = j.at("gains").get<std::vector<GainRecord>>();
    r.provenance = j.at("provenance");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("report: ") + e.what());
  }
}

inline ExperimentReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open report '" + path.string() + "'");
  try {
    return report_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("'" + path.string() + "': " + e.what());
  }
}

// ---- CSV -----------------------------------------------------------------

inline constexpr std::string_view kCellsHeader =
    "name,window,lag,plan,mode,n_runs,min,max,mean,std,stderr,ci_low,ci_high,"
    "mean_optimal_epoch,mean_last_epoch,max_overlap";
inline constexpr std::string_view kGainsHeader =
    "name,window,lag,plan,clean,leaky,gain_percent,direction,rank";
inline constexpr std::string_view kRunsHeader = "name,window,lag,plan,mode,run,seed,rmse";
inline constexpr std::string_view kRunGainsHeader = "name,window,lag,plan,run,gain_percent";

namespace detail {

inline std::string num(double v) { return format_double(v); }
inline std::string num(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

inline std::string coords(const std::string& name, std::size_t w, std::size_t l,
                          const SplitPlan& plan) {
  return name + ',' + std::to_string(w) + ',' + std::to_string(l) + ',' + plan.label();
}

}  // namespace detail

inline std::string cells_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << kCellsHeader << '\n';
  for (const auto& c : r.cells) {
    if (!c.stats) continue;
    const auto& s = *c.stats;
    out << detail::coords(c.key.name, c.key.window, c.key.lag, c.key.plan) << ','
        << to_string(c.key.mode) << ',' << s.n_runs << ',' << detail::num(s.min) << ','
        << detail::num(s.max) << ',' << detail::num(s.mean) << ',' << detail::num(s.std_dev) << ','
        << detail::num(s.std_error) << ','
        << (s.ci95 ? detail::num(s.ci95->low) : "") << ','
        << (s.ci95 ? detail::num(s.ci95->high) : "") << ','
        << detail::num(s.mean_optimal_epoch) << ',' << detail::num(s.mean_last_epoch) << ','
        << c.max_overlap << '\n';
  }
  return out.str();
}

inline std::string gains_csv(const std::vector<GainRecord>& gains) {
  std::ostringstream out;
  out << kGainsHeader << '\n';
  for (const auto& g : gains) {
    out << detail::coords(g.name, g.window, g.lag, g.plan) << ',' << detail::num(g.rmse_clean)
        << ',' << detail::num(g.rmse_leaky) << ',' << detail::num(g.gain_percent) << ','
        << to_string(g.direction) << ',' << g.leakage_rank << '\n';
  }
  return out.str();
}

// Writes cells.csv + gains.csv, or report.json, into `dir`. Returns the paths.
inline std::vector<std::filesystem::path> emit_report(const ExperimentReport& r, ReportFormat format,
                                                      const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create '" + dir.string() + "': " + ec.message());
  if (format == ReportFormat::json) {
    const auto path = dir / "report.json";
    detail::write_file(path, report_json(r).dump(2) + "\n");
    return {path};
  }
  const auto cells = dir / "cells.csv", gains = dir / "gains.csv";
  detail::write_file(cells, cells_csv(r));
  detail::write_file(gains, gains_csv(r.gains));
  return {cells, gains};
}

// Long-format plotting data:
//   runs.csv       one row per (cell, repetition) RMSE
//   run_gains.csv  one row per (name, window, lag, plan, repetition) gain,
//                  pairing the clean and leaky runs of the same repetition
inline std::vector<std::filesystem::path> emit_plot_data(const ExperimentReport& r,
                                                         const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create '" + dir.string() + "': " + ec.message());
  std::ostringstream runs, run_gains;
  runs << kRunsHeader << '\n';
  run_gains << kRunGainsHeader << '\n';
  for (const auto& c : r.cells) {
    for (const auto& run : c.runs) {
      runs << detail::coords(c.key.name, c.key.window, c.key.lag, c.key.plan) << ','
           << to_string(c.key.mode) << ',' << run.repetition << ',' << run.seed << ','
           << detail::num(run.rmse) << '\n';
    }
  }
  for (const auto& g : r.gains) {
    const CellResult* clean = nullptr;
    const CellResult* leaky = nullptr;
    for (const auto& c : r.cells) {
      if (c.key.name != g.name || c.key.window != g.window || c.key.lag != g.lag ||
          !(c.key.plan == g.plan)) {
        continue;
      }
      (c.key.mode == Mode::clean ? clean : leaky) = &c;
    }
    if (!clean || !leaky) continue;
    const std::size_t n = std::min(clean->runs.size(), leaky->runs.size());
    for (std::size_t i = 0; i < n; ++i) {
      run_gains << detail::coords(g.name, g.window, g.lag, g.plan) << ','
                << clean->runs[i].repetition << ','
                << detail::num(rmse_gain(clean->runs[i].rmse, leaky->runs[i].rmse).percent) << '\n';
    }
  }
  const auto runs_path = dir / "runs.csv", gains_path = dir / "run_gains.csv";
  detail::write_file(runs_path, runs.str());
  detail::write_file(gains_path, run_gains.str());
  return {runs_path, gains_path};
}

// A row of a previously emitted cells.csv.
struct CellRow {
  std::string name;
  std::size_t window = 0, lag = 0;
  SplitPlan plan;
  Mode mode = Mode::leaky;
  double min = 0.0, max = 0.0, mean = 0.0;
};

// Reads cells.csv rows. Rows with min > max are repaired by swapping, with a
// warning on `warn`.
inline std::vector<CellRow> read_cells_csv(const std::filesystem::path& path,
                                           std::ostream* warn = &std::cerr) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "': empty file");
  const auto header = detail::split_csv_line(line);
  auto col = [&](std::string_view name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw DataError("'" + path.string() + "': missing column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto c_name = col("name"), c_w = col("window"), c_l = col("lag"), c_plan = col("plan"),
             c_mode = col("mode"), c_min = col("min"), c_max = col("max"), c_mean = col("mean");
  std::vector<CellRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_csv_line(line);
    const auto where = "'" + path.string() + "' row " + std::to_string(lineno) + ": ";
    if (f.size() < header.size()) throw DataError(where + "too few fields");
    CellRow row;
    row.name = std::string(f[c_name]);
    double w = 0, l = 0;
    if (!detail::parse_double(f[c_w], w) || !detail::parse_double(f[c_l], l) ||
        !detail::parse_double(f[c_min], row.min) || !detail::parse_double(f[c_max], row.max) ||
        !detail::parse_double(f[c_mean], row.mean)) {
      throw DataError(where + "unparseable number");
    }
    row.window = static_cast<std::size_t>(w);
    row.lag = static_cast<std::size_t>(l);
    row.plan = parse_plan_label(f[c_plan]);
    row.mode = parse_mode(f[c_mode]);
    if (row.min > row.max) {
      if (warn) *warn << "warning: " << where << "min " << row.min << " > max " << row.max
                      << ", swapping\n";
      std::swap(row.min, row.max);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Pairs clean and leaky rows by (window, lag, plan) and ranks the gains.
// Setup names may differ between the two files; the clean name is kept.
inline std::vector<GainRecord> gains_from_rows(const std::vector<CellRow>& clean_rows,
                                               const std::vector<CellRow>& leaky_rows) {
  std::vector<CellResult> cells;
  auto add = [&](const CellRow& row, Mode mode, const std::string& name) {
    CellResult c;
    c.key = {name, row.window, row.lag, row.plan, mode};
    RunStats s;
    s.n_runs = 1;
    s.min = row.min;
    s.max = row.max;
    s.mean = row.mean;
    c.stats = s;
    cells.push_back(std::move(c));
  };
  for (const auto& row : clean_rows) {
    if (row.mode != Mode::clean) continue;
    add(row, Mode::clean, row.name);
    for (const auto& other : leaky_rows) {
      if (other.mode == Mode::leaky && other.window == row.window && other.lag == row.lag &&
          other.plan == row.plan) {
        add(other, Mode::leaky, row.name);
        break;
      }
    }
  }
  return compute_gains(cells);
}

}  // namespace tsleak
