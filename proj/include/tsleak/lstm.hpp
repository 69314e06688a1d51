#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tsleak/error.hpp"

namespace tsleak {

// Gate order inside the stacked gate matrices.
enum class Gate { input = 0, forget = 1, cell = 2, output = 3 };

// Single-layer LSTM over a scalar input sequence with a dense scalar head.
//
// All parameters live in one flat vector so that optimizers, gradient checks
// and checkpoints can treat the model as a point in R^n. Layout:
//   gate weights  4H x (1 + H), column-major; column 0 multiplies the input,
//                 columns 1..H the previous hidden state; row blocks i, f, g, o
//   gate bias     4H
//   head weights  H
//   head bias     1
// Gradients use the same type and layout.
class LstmModel {
 public:
  using Matrix = Eigen::MatrixXd;
  using Vector = Eigen::VectorXd;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Vector>;
  using ConstVectorMap = Eigen::Map<const Vector>;

  LstmModel() : LstmModel(1) {}
  explicit LstmModel(std::size_t hidden_size)
      : hidden_(static_cast<Eigen::Index>(hidden_size)), params_(Vector::Zero(count(hidden_size))) {
    if (hidden_size == 0) throw ConfigError("LSTM hidden size must be positive");
  }

  // Uniform(-k, k) weights with k = 1/sqrt(H); zero biases except the forget
  // gate bias, which starts at 1.
  template <class Rng>
  static LstmModel initialized(std::size_t hidden_size, Rng& rng) {
    LstmModel m(hidden_size);
    const double k = 1.0 / std::sqrt(static_cast<double>(hidden_size));
    std::uniform_real_distribution<double> dist(-k, k);
    auto w = m.gate_weights();
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = dist(rng);
    }
    auto head = m.head_weights();
    for (Eigen::Index i = 0; i < head.size(); ++i) head(i) = dist(rng);
    m.gate_bias(Gate::forget).setOnes();
    return m;
  }

  static Eigen::Index count(std::size_t hidden_size) {
    const auto h = static_cast<Eigen::Index>(hidden_size);
    return 4 * h * (1 + h) + 4 * h + h + 1;
  }

  std::size_t hidden_size() const { return static_cast<std::size_t>(hidden_); }
  Eigen::Index parameter_count() const { return params_.size(); }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }

  MatrixMap gate_weights() { return {params_.data(), 4 * hidden_, 1 + hidden_}; }
  ConstMatrixMap gate_weights() const { return {params_.data(), 4 * hidden_, 1 + hidden_}; }
  VectorMap gate_bias() { return {params_.data() + bias_offset(), 4 * hidden_}; }
  ConstVectorMap gate_bias() const { return {params_.data() + bias_offset(), 4 * hidden_}; }
  VectorMap head_weights() { return {params_.data() + head_offset(), hidden_}; }
  ConstVectorMap head_weights() const { return {params_.data() + head_offset(), hidden_}; }
  double& head_bias() { return params_(params_.size() - 1); }
  double head_bias() const { return params_(params_.size() - 1); }

  // H x (1 + H) weights of one gate.
  auto gate_weights(Gate g) { return gate_weights().middleRows(row(g), hidden_); }
  auto gate_weights(Gate g) const { return gate_weights().middleRows(row(g), hidden_); }
  auto gate_bias(Gate g) { return gate_bias().segment(row(g), hidden_); }
  auto gate_bias(Gate g) const { return gate_bias().segment(row(g), hidden_); }

  bool all_finite() const { return params_.allFinite(); }

  bool operator==(const LstmModel& other) const {
    return hidden_ == other.hidden_ && params_ == other.params_;
  }

 private:
  Eigen::Index row(Gate g) const { return static_cast<Eigen::Index>(g) * hidden_; }
  Eigen::Index bias_offset() const { return 4 * hidden_ * (1 + hidden_); }
  Eigen::Index head_offset() const { return bias_offset() + 4 * hidden_; }

  Eigen::Index hidden_;
  Vector params_;
};

using LstmGradients = LstmModel;

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Activations kept for backpropagation through time, one entry per step.
struct LstmTrace {
  std::vector<Eigen::MatrixXd> gates;  // 4H x B, post-activation
  std::vector<Eigen::MatrixXd> cell;   // H x B, c_t
  std::vector<Eigen::MatrixXd> hidden; // H x B, h_t; hidden[0] = h_0 = 0
  std::vector<Eigen::MatrixXd> cell_tanh;
};

}  // namespace detail

// Runs the recurrence for a batch. `inputs` is W x B, one column per example.
// Returns the 1 x B row of outputs; fills `trace` when given.
inline Eigen::RowVectorXd lstm_forward_batch(const LstmModel& model, const Eigen::MatrixXd& inputs,
                                             detail::LstmTrace* trace = nullptr) {
  const Eigen::Index H = static_cast<Eigen::Index>(model.hidden_size());
  const Eigen::Index W = inputs.rows(), B = inputs.cols();
  const auto weights = model.gate_weights();
  const auto input_w = weights.col(0);
  const auto recurrent_w = weights.rightCols(H);
  const auto bias = model.gate_bias();

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(H, B), c = Eigen::MatrixXd::Zero(H, B);
  Eigen::MatrixXd z(4 * H, B);
  if (trace) {
    *trace = {};
    trace->hidden.push_back(h);
    trace->cell.push_back(c);
  }
  for (Eigen::Index t = 0; t < W; ++t) {
    z.noalias() = recurrent_w * h;
    z.noalias() += input_w * inputs.row(t);
    z.colwise() += bias;
    z.topRows(2 * H) = z.topRows(2 * H).unaryExpr(&detail::sigmoid);
    z.middleRows(2 * H, H) = z.middleRows(2 * H, H).array().tanh();
    z.bottomRows(H) = z.bottomRows(H).unaryExpr(&detail::sigmoid);
    c = z.middleRows(H, H).cwiseProduct(c) + z.topRows(H).cwiseProduct(z.middleRows(2 * H, H));
    Eigen::MatrixXd tc = c.array().tanh();
    h = z.bottomRows(H).cwiseProduct(tc);
    if (trace) {
      trace->gates.push_back(z);
      trace->cell.push_back(c);
      trace->hidden.push_back(h);
      trace->cell_tanh.push_back(std::move(tc));
    }
  }
  Eigen::RowVectorXd out = model.head_weights().transpose() * h;
  out.array() += model.head_bias();
  if (!out.allFinite()) throw NumericError("LSTM forward produced a non-finite value");
  return out;
}

// Output for one input window, from zero initial hidden and cell state.
inline double lstm_forward(const LstmModel& model, std::span<const double> input) {
  for (double v : input) {
    if (!std::isfinite(v)) throw NumericError("LSTM input contains a non-finite value");
  }
  const Eigen::MatrixXd x =
      Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
  return lstm_forward_batch(model, x)(0);
}

// Test hook for mutation testing of the backward pass.
enum class GradientFault { none, zero_forget_gate };

// Batch mean squared error and, when `grad` is non-null, its gradient with
// respect to every parameter (backpropagation through time).
inline double lstm_loss_and_gradient(const LstmModel& model, const Eigen::MatrixXd& inputs,
                                     const Eigen::RowVectorXd& targets, LstmGradients* grad,
                                     GradientFault fault = GradientFault::none) {
  const Eigen::Index H = static_cast<Eigen::Index>(model.hidden_size());
  const Eigen::Index W = inputs.rows(), B = inputs.cols();
  detail::LstmTrace trace;
  const Eigen::RowVectorXd out = lstm_forward_batch(model, inputs, grad ? &trace : nullptr);
  const Eigen::RowVectorXd err = out - targets;
  const double loss = err.squaredNorm() / static_cast<double>(B);
  if (!grad) return loss;

  *grad = LstmGradients(model.hidden_size());
  const Eigen::RowVectorXd dy = err * (2.0 / static_cast<double>(B));
  grad->head_weights() = trace.hidden.back() * dy.transpose();
  grad->head_bias() = dy.sum();

  const auto recurrent_w = model.gate_weights().rightCols(H);
  auto d_weights = grad->gate_weights();
  auto d_bias = grad->gate_bias();

  Eigen::MatrixXd dh = model.head_weights() * dy;  // H x B
  Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(H, B);
  Eigen::MatrixXd dz(4 * H, B);
  for (Eigen::Index t = W - 1; t >= 0; --t) {
    const auto& z = trace.gates[static_cast<std::size_t>(t)];
    const auto& tc = trace.cell_tanh[static_cast<std::size_t>(t)];
    const auto& c_prev = trace.cell[static_cast<std::size_t>(t)];
    const auto& h_prev = trace.hidden[static_cast<std::size_t>(t)];
    const auto i = z.topRows(H).array();
    const auto f = z.middleRows(H, H).array();
    const auto g = z.middleRows(2 * H, H).array();
    const auto o = z.bottomRows(H).array();

    dc.array() += dh.array() * o * (1.0 - tc.array().square());
    dz.topRows(H) = (dc.array() * g * i * (1.0 - i)).matrix();
    dz.middleRows(H, H) = (dc.array() * c_prev.array() * f * (1.0 - f)).matrix();
    dz.middleRows(2 * H, H) = (dc.array() * i * (1.0 - g.square())).matrix();
    dz.bottomRows(H) = (dh.array() * tc.array() * o * (1.0 - o)).matrix();

    d_weights.col(0).noalias() += dz * inputs.row(t).transpose();
    d_weights.rightCols(H).noalias() += dz * h_prev.transpose();
    d_bias.noalias() += dz.rowwise().sum();

    dh.noalias() = recurrent_w.transpose() * dz;
    dc.array() *= f;
  }
  if (fault == GradientFault::zero_forget_gate) {
    grad->gate_weights(Gate::forget).setZero();
    grad->gate_bias(Gate::forget).setZero();
  }
  return loss;
}

// Maximum relative error between the analytic gradient of the batch MSE and
// central finite differences, over every parameter. The denominator is
// max(|analytic|, |numeric|, 1e-8).
inline double gradient_check(const LstmModel& model, const Eigen::MatrixXd& inputs,
                             const Eigen::RowVectorXd& targets, double epsilon,
                             GradientFault fault = GradientFault::none) {
  LstmGradients analytic;
  lstm_loss_and_gradient(model, inputs, targets, &analytic, fault);
  LstmModel probe = model;
  double worst = 0.0;
  for (Eigen::Index p = 0; p < probe.parameter_count(); ++p) {
    const double saved = probe.parameters()(p);
    probe.parameters()(p) = saved + epsilon;
    const double up = lstm_loss_and_gradient(probe, inputs, targets, nullptr);
    probe.parameters()(p) = saved - epsilon;
    const double down = lstm_loss_and_gradient(probe, inputs, targets, nullptr);
    probe.parameters()(p) = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double a = analytic.parameters()(p);
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  }
  return worst;
}

}  // namespace tsleak
