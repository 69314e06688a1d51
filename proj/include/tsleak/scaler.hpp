#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsleak/error.hpp"
#include "tsleak/windowing.hpp"

namespace tsleak {

enum class Scaling { none, minmax, zscore };

inline std::string_view to_string(Scaling s) {
  switch (s) {
    case Scaling::none: return "none";
    case Scaling::minmax: return "minmax";
    case Scaling::zscore: return "zscore";
  }
  return "?";
}

inline Scaling parse_scaling(std::string_view s) {
  if (s == "none") return Scaling::none;
  if (s == "minmax") return Scaling::minmax;
  if (s == "zscore") return Scaling::zscore;
  throw ConfigError("unknown scaling '" + std::string(s) + "'");
}

// Affine value transform x' = (x - shift) / scale. Parameters are fixed at
// construction; the only way to obtain a fitted scaler is from a training set.
class Scaler {
 public:
  Scaler() = default;

  // Fits on the distinct raw observations covered by the training pairs
  // (inputs and targets), each counted once.
  static Scaler fit(Scaling kind, const SequenceSet& train) {
    std::vector<std::pair<std::size_t, double>> points;
    for (const auto& p : train.pairs) {
      for (std::size_t i = 0; i < p.input.size(); ++i) points.emplace_back(p.input_start + i, p.input[i]);
      points.emplace_back(p.target_index, p.target);
    }
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    points.erase(std::unique(points.begin(), points.end(),
                             [](const auto& a, const auto& b) { return a.first == b.first; }),
                 points.end());
    std::vector<double> values;
    values.reserve(points.size());
    for (const auto& [index, value] : points) values.push_back(value);
    return fit(kind, values);
  }

  static Scaler fit(Scaling kind, const std::vector<double>& values) {
    Scaler s;
    s.kind_ = kind;
    if (kind == Scaling::none) return s;
    if (values.empty()) throw DataError("cannot fit a scaler on no data");
    if (kind == Scaling::minmax) {
      const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
      s.shift_ = *lo;
      s.scale_ = *hi > *lo ? *hi - *lo : 1.0;
    } else {
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / static_cast<double>(values.size()));
      s.shift_ = mean;
      s.scale_ = sd > 0.0 ? sd : 1.0;
    }
    return s;
  }

  // Rebuilds a scaler from stored parameters (checkpoints).
  static Scaler from_parameters(Scaling kind, double shift, double scale) {
    if (!(scale > 0.0) || !std::isfinite(shift)) throw DataError("invalid scaler parameters");
    Scaler s;
    s.kind_ = kind;
    s.shift_ = kind == Scaling::none ? 0.0 : shift;
    s.scale_ = kind == Scaling::none ? 1.0 : scale;
    return s;
  }

  double transform(double x) const { return (x - shift_) / scale_; }
  double inverse_transform(double x) const { return x * scale_ + shift_; }

  Scaling kind() const { return kind_; }
  double shift() const { return shift_; }
  double scale() const { return scale_; }

  bool operator==(const Scaler&) const = default;

 private:
  Scaling kind_ = Scaling::none;
  double shift_ = 0.0;
  double scale_ = 1.0;
};

}  // namespace tsleak
