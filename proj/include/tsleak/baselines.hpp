#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "tsleak/error.hpp"
#include "tsleak/windowing.hpp"

namespace tsleak {

// Last observed value as the forecast.
inline std::vector<double> baseline_persistence(const SequenceSet& set) {
  std::vector<double> out;
  out.reserve(set.size());
  for (const auto& p : set.pairs) {
    if (p.input.empty()) throw DataError("persistence baseline needs non-empty inputs");
    out.push_back(p.input.back());
  }
  return out;
}

// Least-squares AR(W) model with intercept: target ~ b0 + sum_j b_j * input_j.
struct LinearAr {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;  // one per input position, oldest first
  bool used_ridge = false;

  double predict(const std::vector<double>& input) const {
    double y = intercept;
    for (Eigen::Index j = 0; j < coefficients.size(); ++j) {
      y += coefficients(j) * input[static_cast<std::size_t>(j)];
    }
    return y;
  }
};

inline constexpr double kArRidge = 1e-8;

// Fits on centered data so the intercept is never penalized; falls back to a
// ridge of 1e-8 when the centered normal equations are rank deficient.
inline LinearAr fit_linear_ar(const SequenceSet& train) {
  const auto w = static_cast<Eigen::Index>(train.config.window_size);
  const auto n = static_cast<Eigen::Index>(train.size());
  if (n < w + 1) {
    throw DataError("insufficient training pairs for AR(" + std::to_string(w) + "): have " +
                    std::to_string(n) + ", need " + std::to_string(w + 1));
  }
  Eigen::MatrixXd x(n, w);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& p = train.pairs[static_cast<std::size_t>(k)];
    for (Eigen::Index j = 0; j < w; ++j) x(k, j) = p.input[static_cast<std::size_t>(j)];
    y(k) = p.target;
  }
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  x.rowwise() -= x_mean;
  y.array() -= y_mean;

  Eigen::MatrixXd gram = x.transpose() * x;
  const Eigen::VectorXd rhs = x.transpose() * y;
  LinearAr model;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  lu.setThreshold(1e-12);
  if (lu.rank() == w) {
    model.coefficients = lu.solve(rhs);
  } else {
    gram.diagonal().array() += kArRidge;
    model.coefficients = gram.ldlt().solve(rhs);
    model.used_ridge = true;
  }
  if (!model.coefficients.allFinite()) throw NumericError("AR fit failed even with ridge");
  model.intercept = y_mean - x_mean.dot(model.coefficients);
  return model;
}

inline std::vector<double> baseline_linear_ar(const SequenceSet& train, const SequenceSet& eval) {
  const auto model = fit_linear_ar(train);
  std::vector<double> out;
  out.reserve(eval.size());
  for (const auto& p : eval.pairs) out.push_back(model.predict(p.input));
  return out;
}

}  // namespace tsleak
