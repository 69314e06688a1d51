#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "tsleak/error.hpp"
#include "tsleak/series.hpp"

namespace tsleak {

// Classical additive decomposition: value = trend + seasonal + residual.
//
// `trend` and `residual` are NaN for the first and last period/2 points, where
// the centered moving average is undefined. `seasonal` is defined everywhere.
struct Decomposition {
  std::vector<double> trend;
  std::vector<double> seasonal;
  std::vector<double> residual;
  std::size_t period = 0;

  bool trend_defined(std::size_t i) const { return !std::isnan(trend[i]); }
};

inline Decomposition seasonal_decompose(std::span<const double> values, std::size_t period) {
  if (period == 0) throw ConfigError("seasonal_decompose: period must be positive");
  const std::size_t n = values.size();
  if (n < 2 * period) {
    throw DataError("seasonal_decompose: series of length " + std::to_string(n) +
                    " is shorter than two periods (" + std::to_string(2 * period) + ")");
  }
  constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

  Decomposition d;
  d.period = period;
  d.trend.assign(n, kMissing);
  d.residual.assign(n, kMissing);
  d.seasonal.assign(n, 0.0);

  // Odd periods: plain centered mean of `period` points. Even periods: the
  // 2 x period average, i.e. period + 1 points with half weight at both ends.
  const std::size_t half = period / 2;
  for (std::size_t i = half; i + half < n; ++i) {
    double sum = 0.0;
    if (period % 2 == 1) {
      for (std::size_t j = i - half; j <= i + half; ++j) sum += values[j];
    } else {
      sum = 0.5 * (values[i - half] + values[i + half]);
      for (std::size_t j = i - half + 1; j < i + half; ++j) sum += values[j];
    }
    d.trend[i] = sum / static_cast<double>(period);
  }

  std::vector<double> phase_sum(period, 0.0);
  std::vector<std::size_t> phase_count(period, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!d.trend_defined(i)) continue;
    phase_sum[i % period] += values[i] - d.trend[i];
    ++phase_count[i % period];
  }
  std::vector<double> phase_mean(period, 0.0);
  double grand = 0.0;
  for (std::size_t p = 0; p < period; ++p) {
    phase_mean[p] = phase_count[p] ? phase_sum[p] / static_cast<double>(phase_count[p]) : 0.0;
    grand += phase_mean[p];
  }
  grand /= static_cast<double>(period);
  for (auto& m : phase_mean) m -= grand;

  for (std::size_t i = 0; i < n; ++i) {
    d.seasonal[i] = phase_mean[i % period];
    if (d.trend_defined(i)) d.residual[i] = values[i] - d.trend[i] - d.seasonal[i];
  }
  return d;
}

inline Decomposition seasonal_decompose(const TimeSeries& series, std::size_t period) {
  return seasonal_decompose(series.values(), period);
}

}  // namespace tsleak
