#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "tsleak/error.hpp"
#include "tsleak/splitting.hpp"

namespace tsleak {

inline double rmse(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size()) {
    throw DataError("rmse: " + std::to_string(predictions.size()) + " predictions vs " +
                    std::to_string(targets.size()) + " targets");
  }
  if (predictions.empty()) throw DataError("rmse: empty input");
  double ss = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double r = predictions[i] - targets[i];
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(predictions.size()));
}

// Two-sided 95% Student-t critical value, t_{0.975, df}.
inline double t_critical_95(std::size_t df) {
  if (df < 1) throw ConfigError("t quantile needs df >= 1");
  boost::math::students_t dist(static_cast<double>(df));
  return boost::math::quantile(dist, 0.975);
}

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
  bool operator==(const ConfidenceInterval&) const = default;
};

// Summary of repeated-run RMSEs. std_dev, std_error and ci95 need at least two runs
// and are empty otherwise.
struct RunStats {
  std::size_t n_runs = 0;
  double min = 0.0, max = 0.0, mean = 0.0;
  std::optional<double> std_dev, std_error;
  std::optional<ConfidenceInterval> ci95;
  std::optional<double> mean_optimal_epoch, mean_last_epoch;

  bool operator==(const RunStats&) const = default;
};

inline RunStats aggregate(std::span<const double> runs,
                          std::span<const double> optimal_epochs = {},
                          std::span<const double> last_epochs = {}) {
  if (runs.empty()) throw DataError("aggregate: no runs");
  RunStats s;
  s.n_runs = runs.size();
  const auto [lo, hi] = std::minmax_element(runs.begin(), runs.end());
  s.min = *lo;
  s.max = *hi;
  s.mean = std::accumulate(runs.begin(), runs.end(), 0.0) / static_cast<double>(s.n_runs);
  if (s.n_runs >= 2) {
    double ss = 0.0;
    for (double r : runs) ss += (r - s.mean) * (r - s.mean);
    s.std_dev = std::sqrt(ss / static_cast<double>(s.n_runs - 1));
    s.std_error = *s.std_dev / std::sqrt(static_cast<double>(s.n_runs));
    const double half = t_critical_95(s.n_runs - 1) * *s.std_error;
    s.ci95 = ConfidenceInterval{s.mean - half, s.mean + half};
  }
  auto mean_of = [](std::span<const double> v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  s.mean_optimal_epoch = mean_of(optimal_epochs);
  s.mean_last_epoch = mean_of(last_epochs);
  return s;
}

enum class Direction { up, down };

inline std::string_view to_string(Direction d) { return d == Direction::up ? "up" : "down"; }

struct Gain {
  double percent = 0.0;
  Direction direction = Direction::down;
};

// Relative RMSE change attributable to leakage, in percent. Positive means the
// leaky setup looks better than it should.
inline Gain rmse_gain(double clean, double leaky) {
  if (!(clean > 0.0)) throw DataError("rmse_gain: clean RMSE must be positive");
  const double pct = (clean - leaky) / clean * 100.0;
  return {pct, pct > 0.0 ? Direction::up : Direction::down};
}

struct GainRecord {
  std::string name;
  std::size_t window = 0;
  std::size_t lag = 0;
  SplitPlan plan;
  double rmse_clean = 0.0;
  double rmse_leaky = 0.0;
  double gain_percent = 0.0;
  Direction direction = Direction::down;
  std::size_t leakage_rank = 0;

  bool operator==(const GainRecord&) const = default;
};

inline GainRecord make_gain_record(std::string name, std::size_t window, std::size_t lag,
                                   SplitPlan plan, double clean, double leaky) {
  const Gain g = rmse_gain(clean, leaky);
  return {std::move(name), window, lag, std::move(plan), clean, leaky, g.percent, g.direction, 0};
}

// Ranks records within one (name, window, lag) group: 1 = smallest |gain|.
// Ties go to plan order 2-way, 3-way, k-fold.
inline std::vector<GainRecord> leakage_rank(std::vector<GainRecord> records) {
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double ga = std::abs(records[a].gain_percent), gb = std::abs(records[b].gain_percent);
    if (ga != gb) return ga < gb;
    return static_cast<int>(records[a].plan.kind) < static_cast<int>(records[b].plan.kind);
  });
  for (std::size_t r = 0; r < idx.size(); ++r) records[idx[r]].leakage_rank = r + 1;
  return records;
}

}  // namespace tsleak
