#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsleak/audit.hpp"
#include "tsleak/baselines.hpp"
#include "tsleak/config.hpp"
#include "tsleak/error.hpp"
#include "tsleak/metrics.hpp"
#include "tsleak/series.hpp"
#include "tsleak/splitting.hpp"
#include "tsleak/trainer.hpp"

namespace tsleak {

inline constexpr std::string_view kVersion = "0.1.0";

// How numbers in a report were produced. Embedded in every JSON report.
inline constexpr std::string_view kFoldAggregation =
    "k-fold run RMSE is the mean of the k per-fold test RMSEs";
inline constexpr std::string_view kEarlyStoppingMonitor =
    "early stopping monitors validation MSE when the plan has a validation set, otherwise the "
    "epoch's mean training MSE; best-epoch weights are restored";

// Coordinates of one report cell.
struct CellKey {
  std::string name;  // setup name
  std::size_t window = 0;
  std::size_t lag = 0;
  SplitPlan plan;
  Mode mode = Mode::leaky;

  std::string label() const {
    return "(" + name + ", W=" + std::to_string(window) + ", L=" + std::to_string(lag) + ", " +
           plan.label() + ", " + std::string(to_string(mode)) + ")";
  }

  bool operator==(const CellKey&) const = default;
};

struct RunRecord {
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  double rmse = 0.0;
  std::vector<double> fold_rmses;
  std::optional<double> optimal_epoch;  // mean over folds, LSTM only
  std::optional<double> last_epoch;
  std::size_t max_overlap = 0;

  bool operator==(const RunRecord&) const = default;
};

struct CellResult {
  CellKey key;
  std::vector<RunRecord> runs;
  std::optional<RunStats> stats;
  std::vector<AuditReport> audits;  // per fold, from the first repetition
  std::size_t max_overlap = 0;      // over all folds and repetitions
  std::optional<std::string> error;

  bool operator==(const CellResult&) const = default;
};

struct ExperimentReport {
  std::string name;
  std::vector<CellResult> cells;
  std::vector<GainRecord> gains;
  nlohmann::json provenance;

  bool operator==(const ExperimentReport&) const = default;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace detail

// Seed for one repetition of a cell. Depends only on the cell's coordinates
// (not on its position in the grid). The mode is deliberately left out so a
// clean cell and its leaky twin share initial weights and shuffles for the
// same repetition, which pairs the comparison.
inline std::uint64_t derive_seed(std::uint64_t base, const CellKey& key, std::size_t repetition) {
  std::uint64_t h = detail::fnv1a(key.name);
  h = detail::splitmix64(h ^ key.window);
  h = detail::splitmix64(h ^ (key.lag << 20));
  h = detail::splitmix64(h ^ detail::fnv1a(key.plan.label()));
  for (double f : key.plan.fractions) h = detail::splitmix64(h ^ static_cast<std::uint64_t>(f * 1e6));
  h = detail::splitmix64(h ^ (repetition << 40));
  return base ^ h;
}

inline std::uint64_t fold_seed(std::uint64_t run_seed, std::size_t fold) {
  return detail::splitmix64(run_seed ^ (0xF01Dull + fold));
}

struct RunOutput {
  RunRecord record;
  std::vector<AuditReport> audits;
};

// One repetition of one cell: split, audit, fit per fold, score on test.
inline RunOutput run_cell_once(const TimeSeries& series, const Setup& setup, const CellKey& key,
                               std::size_t repetition, std::uint64_t seed) {
  SplitSpec spec{key.plan, key.mode, setup.order, WindowConfig(key.window, key.lag), seed};
  const auto folds = split(series, spec);

  RunOutput out;
  out.record.repetition = repetition;
  out.record.seed = seed;
  double opt_sum = 0.0, last_sum = 0.0;
  for (const auto& fold : folds) {
    auto report = audit(fold);
    if (key.mode == Mode::clean && report.is_contaminated) {
      throw ContaminationError("clean cell " + key.label() + " fold " +
                               std::to_string(fold.fold_index) + " shares " +
                               std::to_string(report.overlap_count) +
                               " raw indices between train and test");
    }
    out.record.max_overlap = std::max(out.record.max_overlap, report.overlap_count);
    out.audits.push_back(std::move(report));

    std::vector<double> targets;
    targets.reserve(fold.test.size());
    for (const auto& p : fold.test.pairs) targets.push_back(p.target);

    std::vector<double> predictions;
    switch (setup.model) {
      case ModelKind::lstm: {
        TrainConfig cfg = setup.train;
        cfg.seed = fold_seed(seed, fold.fold_index);
        const auto outcome = train(fold.train, fold.val, cfg);
        predictions = predict(outcome, fold.test);
        opt_sum += static_cast<double>(outcome.optimal_epoch);
        last_sum += static_cast<double>(outcome.last_epoch);
        break;
      }
      case ModelKind::persistence:
        predictions = baseline_persistence(fold.test);
        break;
      case ModelKind::linear_ar:
        predictions = baseline_linear_ar(fold.train, fold.test);
        break;
    }
    out.record.fold_rmses.push_back(rmse(predictions, targets));
  }
  double total = 0.0;
  for (double r : out.record.fold_rmses) total += r;
  out.record.rmse = total / static_cast<double>(out.record.fold_rmses.size());
  if (setup.model == ModelKind::lstm) {
    out.record.optimal_epoch = opt_sum / static_cast<double>(folds.size());
    out.record.last_epoch = last_sum / static_cast<double>(folds.size());
  }
  return out;
}

// Builds gain records for every (name, window, lag, plan) that has both a
// clean and a leaky cell, ranked within each (name, window, lag) group.
inline std::vector<GainRecord> compute_gains(const std::vector<CellResult>& cells) {
  std::vector<GainRecord> gains;
  for (const auto& clean : cells) {
    if (clean.key.mode != Mode::clean || !clean.stats) continue;
    for (const auto& leaky : cells) {
      if (leaky.key.mode != Mode::leaky || !leaky.stats) continue;
      if (leaky.key.name != clean.key.name || leaky.key.window != clean.key.window ||
          leaky.key.lag != clean.key.lag || !(leaky.key.plan == clean.key.plan)) {
        continue;
      }
      gains.push_back(make_gain_record(clean.key.name, clean.key.window, clean.key.lag,
                                       clean.key.plan, clean.stats->mean, leaky.stats->mean));
    }
  }
  // Rank group by group, preserving the original order.
  std::vector<GainRecord> ranked = gains;
  std::vector<bool> done(gains.size(), false);
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> members;
    for (std::size_t j = i; j < gains.size(); ++j) {
      if (gains[j].name == gains[i].name && gains[j].window == gains[i].window &&
          gains[j].lag == gains[i].lag) {
        members.push_back(j);
        done[j] = true;
      }
    }
    std::vector<GainRecord> group;
    for (auto j : members) group.push_back(gains[j]);
    group = leakage_rank(std::move(group));
    for (std::size_t m = 0; m < members.size(); ++m) ranked[members[m]] = group[m];
  }
  return ranked;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

using ProgressFn = std::function<void(std::string_view)>;

// Runs every cell of the grid `repetitions` times and assembles the report.
// Cells are ordered setup x (window, lag) x plan x mode. A clean cell that
// audits contaminated always aborts with ContaminationError; other per-cell
// failures abort unless keep_going is set, in which case the cell carries the
// error and is left out of the statistics.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, const TimeSeries& series,
                                       const ProgressFn& progress = {}) {
  cfg.validate();
  const std::uint64_t base_seed = cfg.base_seed ? *cfg.base_seed : std::random_device{}();

  struct CellPlan {
    CellKey key;
    const Setup* setup;
  };
  std::vector<CellPlan> cells;
  for (const auto& setup : cfg.setups) {
    for (const auto& [w, l] : cfg.grid()) {
      for (const auto& plan : cfg.plans) {
        for (Mode mode : cfg.modes) cells.push_back({{setup.name, w, l, plan, mode}, &setup});
      }
    }
  }

  const std::size_t reps = cfg.repetitions;
  const std::size_t total = cells.size() * reps;
  std::vector<std::optional<RunOutput>> outputs(total);
  std::vector<std::optional<std::string>> errors(cells.size());
  std::atomic<std::size_t> next{0}, finished{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::exception_ptr fatal;

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t task = next.fetch_add(1);
      if (task >= total) return;
      const std::size_t c = task / reps, r = task % reps;
      const auto& plan = cells[c];
      {
        std::lock_guard lock(mu);
        if (errors[c]) continue;
      }
      try {
        outputs[task] = run_cell_once(series, *plan.setup, plan.key, r,
                                      derive_seed(base_seed, plan.key, r));
      } catch (const ContaminationError&) {
        std::lock_guard lock(mu);
        if (!fatal) fatal = std::current_exception();
        stop = true;
      } catch (const Error& e) {
        std::lock_guard lock(mu);
        const std::string msg = "cell " + plan.key.label() + ": " + e.what();
        if (cfg.keep_going) {
          if (!errors[c]) errors[c] = msg;
        } else {
          if (!fatal) fatal = std::make_exception_ptr(DataError(msg));
          stop = true;
        }
      }
      const std::size_t done = ++finished;
      if (progress) {
        std::lock_guard lock(mu);
        progress("run " + std::to_string(done) + "/" + std::to_string(total) + " " +
                 plan.key.label() + " rep " + std::to_string(r));
      }
    }
  };
  const std::size_t nthreads = std::min(cfg.workers, std::max<std::size_t>(total, 1));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);

  ExperimentReport report;
  report.name = cfg.name;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellResult cell;
    cell.key = cells[c].key;
    if (errors[c]) {
      cell.error = errors[c];
      report.cells.push_back(std::move(cell));
      continue;
    }
    std::vector<double> rmses, opt, last;
    for (std::size_t r = 0; r < reps; ++r) {
      auto& out = outputs[c * reps + r];
      if (r == 0) cell.audits = out->audits;
      cell.max_overlap = std::max(cell.max_overlap, out->record.max_overlap);
      rmses.push_back(out->record.rmse);
      if (out->record.optimal_epoch) opt.push_back(*out->record.optimal_epoch);
      if (out->record.last_epoch) last.push_back(*out->record.last_epoch);
      cell.runs.push_back(std::move(out->record));
    }
    cell.stats = aggregate(rmses, opt, last);
    report.cells.push_back(std::move(cell));
  }
  report.gains = compute_gains(report.cells);
  report.provenance = {{"tool", "tsleak"},
                       {"version", kVersion},
                       {"created_at", utc_timestamp()},
                       {"base_seed", base_seed},
                       {"seeded", cfg.base_seed.has_value()},
                       {"series", {{"name", series.name()}, {"length", series.size()}}},
                       {"conventions",
                        {{"kfold_aggregation", kFoldAggregation},
                         {"early_stopping_monitor", kEarlyStoppingMonitor},
                         {"confidence_interval", "mean +/- t(0.975, n-1) * std/sqrt(n)"},
                         {"gain_percent", "(clean - leaky) / clean * 100"}}},
                       {"config", config_json(cfg)}};
  return report;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {}) {
  const auto series =
      load_csv(cfg.dataset.path, cfg.dataset.value_column, cfg.dataset.date_column);
  return run_experiment(cfg, series, progress);
}

}  // namespace tsleak
