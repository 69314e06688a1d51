// Command-line front end for the tsleak library.
//
//   tsleak stats  <csv>                      descriptive stats + decomposition
//   tsleak run    <config>                   full experiment grid
//   tsleak audit  <config>                   split + audit only, no training
//   tsleak gain   <clean.csv> <leaky.csv>    recompute gains from cells.csv files
//   tsleak report <run-dir> --format csv|json
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 contaminated clean cell.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tsleak/tsleak.hpp"

namespace fs = std::filesystem;
using tsleak::detail::format_fixed;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kContaminated = 3 };

struct Options {
  std::string input;
  std::string second_input;
  std::string value_column = "meantemp";
  std::string date_column = "date";
  std::size_t period = 365;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool keep_going = false;
  bool quiet = false;
  std::string out;
  std::string format = "csv";
};

tsleak::ExperimentConfig load_with_overrides(const Options& opt) {
  auto cfg = tsleak::load_config(opt.input);
  if (opt.seed) cfg.base_seed = opt.seed;
  if (opt.workers) cfg.workers = *opt.workers;
  if (opt.keep_going) cfg.keep_going = true;
  cfg.validate();
  return cfg;
}

int cmd_stats(const Options& opt) {
  const auto series = tsleak::load_csv(opt.input, opt.value_column, opt.date_column);
  const auto s = tsleak::describe(series);
  std::cout << "series   " << series.name() << " (" << tsleak::format_date(series.timestamps().front())
            << " .. " << tsleak::format_date(series.timestamps().back()) << ")\n"
            << "count    " << s.count << "\n"
            << "mean     " << format_fixed(s.mean, 4) << "\n"
            << "std      " << format_fixed(s.std_dev, 4) << "\n"
            << "min      " << format_fixed(s.min, 4) << "\n"
            << "median   " << format_fixed(s.median, 4) << "\n"
            << "max      " << format_fixed(s.max, 4) << "\n";
  if (series.size() < 2 * opt.period) {
    std::cout << "decomposition skipped: need at least " << 2 * opt.period << " points\n";
    return kOk;
  }
  const auto d = tsleak::seasonal_decompose(series, opt.period);
  std::size_t first = 0, last = series.size() - 1;
  while (!d.trend_defined(first)) ++first;
  while (!d.trend_defined(last)) --last;
  const auto [smin, smax] = std::minmax_element(d.seasonal.begin(), d.seasonal.end());
  double ss = 0.0;
  std::size_t n = 0;
  for (std::size_t i = first; i <= last; ++i, ++n) ss += d.residual[i] * d.residual[i];
  std::cout << "decomposition (additive, period " << opt.period << ")\n"
            << "  trend      " << format_fixed(d.trend[first], 4) << " -> "
            << format_fixed(d.trend[last], 4) << " (defined on [" << first << ", " << last << "])\n"
            << "  seasonal   range [" << format_fixed(*smin, 4) << ", " << format_fixed(*smax, 4)
            << "]\n"
            << "  residual   rms " << format_fixed(std::sqrt(ss / static_cast<double>(n)), 4) << "\n";
  return kOk;
}

int cmd_run(const Options& opt) {
  const auto cfg = load_with_overrides(opt);
  tsleak::ProgressFn progress;
  if (!opt.quiet) progress = [](std::string_view msg) { std::cerr << msg << '\n'; };
  const auto report = tsleak::run_experiment(cfg, progress);
  const fs::path out = opt.out.empty() ? fs::path("runs") / cfg.name : fs::path(opt.out);
  tsleak::emit_report(report, tsleak::ReportFormat::json, out);
  tsleak::emit_report(report, tsleak::ReportFormat::csv, out);
  tsleak::emit_plot_data(report, out);

  std::cout << "cells (" << report.cells.size() << ")\n";
  for (const auto& c : report.cells) {
    std::cout << "  " << std::left << std::setw(44) << c.key.label();
    if (c.error) {
      std::cout << "error: " << *c.error << '\n';
      continue;
    }
    std::cout << " mean " << format_fixed(c.stats->mean, 4);
    if (c.stats->ci95) {
      std::cout << " (" << format_fixed(c.stats->ci95->low, 4) << ", "
                << format_fixed(c.stats->ci95->high, 4) << ")";
    }
    std::cout << " overlap " << c.max_overlap << '\n';
  }
  if (!report.gains.empty()) {
    std::cout << "gains\n";
    for (const auto& g : report.gains) {
      std::cout << "  " << g.name << " W=" << g.window << " L=" << g.lag << " " << g.plan.label()
                << ": clean " << format_fixed(g.rmse_clean, 4) << " leaky "
                << format_fixed(g.rmse_leaky, 4) << " gain " << format_fixed(g.gain_percent, 2)
                << "% (" << tsleak::to_string(g.direction) << ") rank " << g.leakage_rank << '\n';
    }
  }
  std::cout << "wrote " << out.string() << '\n';
  return kOk;
}

int cmd_audit(const Options& opt) {
  const auto cfg = load_with_overrides(opt);
  const auto series =
      tsleak::load_csv(cfg.dataset.path, cfg.dataset.value_column, cfg.dataset.date_column);
  const std::uint64_t base = cfg.base_seed ? *cfg.base_seed : std::random_device{}();
  nlohmann::json out = nlohmann::json::array();
  bool contaminated_clean = false;
  for (const auto& setup : cfg.setups) {
    for (const auto& [w, l] : cfg.grid()) {
      for (const auto& plan : cfg.plans) {
        for (auto mode : cfg.modes) {
          const tsleak::CellKey key{setup.name, w, l, plan, mode};
          const tsleak::SplitSpec spec{plan, mode, setup.order, tsleak::WindowConfig(w, l),
                                       tsleak::derive_seed(base, key, 0)};
          const auto folds = tsleak::split(series, spec);
          std::size_t worst = 0;
          nlohmann::json jfolds = nlohmann::json::array();
          for (const auto& fold : folds) {
            const auto report = tsleak::audit(fold);
            worst = std::max(worst, report.overlap_count);
            nlohmann::json jf{{"fold", fold.fold_index},
                              {"summary", tsleak::describe_split(fold)},
                              {"audit", report}};
            if (report.is_contaminated) {
              try {
                jf["minimal_clearing_gap"] = tsleak::minimal_clearing_gap(fold);
              } catch (const tsleak::DataError&) {
                jf["minimal_clearing_gap"] = nullptr;
              }
            }
            jfolds.push_back(std::move(jf));
          }
          if (mode == tsleak::Mode::clean && worst > 0) contaminated_clean = true;
          std::cout << std::left << std::setw(44) << key.label() << " folds " << folds.size()
                    << "  max overlap " << worst << '\n';
          out.push_back({{"key", key}, {"max_overlap", worst}, {"folds", std::move(jfolds)}});
        }
      }
    }
  }
  if (!opt.out.empty()) {
    fs::create_directories(opt.out);
    tsleak::detail::write_file(fs::path(opt.out) / "audit.json", out.dump(2) + "\n");
  }
  if (contaminated_clean) {
    std::cerr << "error: a clean-mode split is contaminated\n";
    return kContaminated;
  }
  return kOk;
}

int cmd_gain(const Options& opt) {
  const auto clean = tsleak::read_cells_csv(opt.input);
  const auto leaky = tsleak::read_cells_csv(opt.second_input);
  const auto gains = tsleak::gains_from_rows(clean, leaky);
  if (gains.empty()) throw tsleak::DataError("no matching clean/leaky cells");
  if (!opt.out.empty()) {
    fs::create_directories(opt.out);
    tsleak::detail::write_file(fs::path(opt.out) / "gains.csv", tsleak::gains_csv(gains));
  }
  std::cout << tsleak::gains_csv(gains);
  return kOk;
}

int cmd_report(const Options& opt) {
  const fs::path dir(opt.input);
  const auto report = tsleak::load_report(dir / "report.json");
  const fs::path out = opt.out.empty() ? dir : fs::path(opt.out);
  for (const auto& p : tsleak::emit_report(report, tsleak::parse_report_format(opt.format), out)) {
    std::cout << "wrote " << p.string() << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leakage-aware evaluation harness for univariate time-series forecasting"};
  app.require_subcommand(1);
  Options opt;

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.seed, "Base seed (overrides the config)");
    cmd->add_option("--workers", opt.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("--keep-going", opt.keep_going, "Continue past failing cells");
    cmd->add_option("--out", opt.out, "Output directory");
  };

  auto* stats = app.add_subcommand("stats", "Descriptive statistics and seasonal decomposition");
  stats->add_option("csv", opt.input, "Input CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--value-column", opt.value_column, "Value column")->capture_default_str();
  stats->add_option("--date-column", opt.date_column, "Date column")->capture_default_str();
  stats->add_option("--period", opt.period, "Seasonal period in days")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "Run an experiment grid");
  run->add_option("config", opt.input, "Experiment config (JSON)")->required();
  run->add_flag("--quiet", opt.quiet, "No progress output");
  add_run_flags(run);

  auto* audit = app.add_subcommand("audit", "Split and audit only, no training");
  audit->add_option("config", opt.input, "Experiment config (JSON)")->required();
  add_run_flags(audit);

  auto* gain = app.add_subcommand("gain", "Recompute RMSE gains from two cells.csv reports");
  gain->add_option("clean", opt.input, "cells.csv with clean cells")->required();
  gain->add_option("leaky", opt.second_input, "cells.csv with leaky cells")->required();
  gain->add_option("--out", opt.out, "Output directory for gains.csv");

  auto* report = app.add_subcommand("report", "Re-emit a finished run's report");
  report->add_option("run-dir", opt.input, "Directory containing report.json")->required();
  report->add_option("--format", opt.format, "csv or json")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  report->add_option("--out", opt.out, "Output directory (default: run-dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*stats) return cmd_stats(opt);
    if (*run) return cmd_run(opt);
    if (*audit) return cmd_audit(opt);
    if (*gain) return cmd_gain(opt);
    if (*report) return cmd_report(opt);
  } catch (const tsleak::ContaminationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kContaminated;
  } catch (const tsleak::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const tsleak::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
