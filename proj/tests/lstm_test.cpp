#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tsleak/lstm.hpp"

namespace tsleak {
namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

TEST(LstmForward, ZeroNetworkOutputsZero) {
  const LstmModel model(8);
  const std::vector<double> x{3.0, -2.0, 7.5, 0.1};
  EXPECT_EQ(lstm_forward(model, x), 0.0);
}

TEST(LstmForward, MatchesHandUnrolledRecurrence) {
  // H = 1: every gate has an input weight, a recurrent weight and a bias.
  const double wx[4] = {0.5, -0.3, 0.8, 0.2};   // i f g o
  const double wh[4] = {0.1, 0.4, -0.6, 0.7};
  const double b[4] = {0.05, 1.0, -0.1, 0.2};
  const double v = 1.3, c0 = -0.4;

  LstmModel model(1);
  for (int g = 0; g < 4; ++g) {
    model.gate_weights()(g, 0) = wx[g];
    model.gate_weights()(g, 1) = wh[g];
    model.gate_bias()(g) = b[g];
  }
  model.head_weights()(0) = v;
  model.head_bias() = c0;

  const double x[2] = {1.0, -1.0};
  double h = 0.0, c = 0.0;
  for (double xt : x) {
    const double i = sig(wx[0] * xt + wh[0] * h + b[0]);
    const double f = sig(wx[1] * xt + wh[1] * h + b[1]);
    const double g = std::tanh(wx[2] * xt + wh[2] * h + b[2]);
    const double o = sig(wx[3] * xt + wh[3] * h + b[3]);
    c = f * c + i * g;
    h = o * std::tanh(c);
  }
  const double expected = v * h + c0;

  const std::vector<double> input{1.0, -1.0};
  EXPECT_NEAR(lstm_forward(model, input), expected, 1e-14);
}

TEST(LstmForward, DeterministicAndBatchConsistent) {
  std::mt19937_64 rng(3);
  const auto model = LstmModel::initialized(6, rng);
  Eigen::MatrixXd batch = Eigen::MatrixXd::Random(7, 5);
  const auto out = lstm_forward_batch(model, batch);
  for (Eigen::Index k = 0; k < batch.cols(); ++k) {
    const std::vector<double> col(batch.col(k).data(), batch.col(k).data() + batch.rows());
    const double a = lstm_forward(model, col), b = lstm_forward(model, col);
    EXPECT_EQ(a, b);
    EXPECT_NEAR(a, out(k), 1e-12);
  }
}

TEST(LstmForward, RejectsNonFiniteInput) {
  const LstmModel model(2);
  const std::vector<double> x{1.0, std::nan("")};
  EXPECT_THROW(lstm_forward(model, x), NumericError);
}

TEST(LstmModel, InitializationAndLayout) {
  std::mt19937_64 rng(1);
  const auto model = LstmModel::initialized(4, rng);
  EXPECT_EQ(model.parameter_count(), 4 * 4 * 5 + 16 + 4 + 1);
  const double k = 0.5;
  EXPECT_LE(model.gate_weights().cwiseAbs().maxCoeff(), k);
  EXPECT_TRUE(model.gate_bias(Gate::forget).isOnes());
  EXPECT_TRUE(model.gate_bias(Gate::input).isZero());
  EXPECT_TRUE(model.gate_bias(Gate::output).isZero());
  EXPECT_EQ(model.head_bias(), 0.0);
  EXPECT_THROW(LstmModel(0), ConfigError);
}

struct Batch {
  Eigen::MatrixXd inputs;
  Eigen::RowVectorXd targets;
};

Batch random_batch(std::mt19937_64& rng, Eigen::Index w, Eigen::Index b) {
  std::normal_distribution<double> n(0.0, 1.0);
  Batch out{Eigen::MatrixXd(w, b), Eigen::RowVectorXd(b)};
  for (Eigen::Index j = 0; j < b; ++j) {
    for (Eigen::Index t = 0; t < w; ++t) out.inputs(t, j) = n(rng);
    out.targets(j) = n(rng);
  }
  return out;
}

TEST(GradientCheck, AnalyticGradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    auto model = LstmModel::initialized(4, rng);
    // Non-trivial biases and head so every gate contributes.
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (Eigen::Index i = 0; i < model.gate_bias().size(); ++i) model.gate_bias()(i) += u(rng);
    model.head_bias() = u(rng);
    const auto batch = random_batch(rng, 5, 3);
    EXPECT_LT(gradient_check(model, batch.inputs, batch.targets, 1e-5), 1e-4) << "seed " << seed;
  }
}

TEST(GradientCheck, DetectsZeroedForgetGateGradient) {
  std::mt19937_64 rng(99);
  const auto model = LstmModel::initialized(4, rng);
  const auto batch = random_batch(rng, 5, 3);
  EXPECT_GT(gradient_check(model, batch.inputs, batch.targets, 1e-5, GradientFault::zero_forget_gate),
            1e-2);
}

TEST(GradientCheck, ZeroModelIsFinite) {
  std::mt19937_64 rng(5);
  const LstmModel model(3);
  const auto batch = random_batch(rng, 4, 2);
  const double err = gradient_check(model, batch.inputs, batch.targets, 1e-5);
  EXPECT_TRUE(std::isfinite(err));
  EXPECT_LT(err, 1e-4);
}

TEST(LossAndGradient, LossIsBatchMse) {
  std::mt19937_64 rng(8);
  const auto model = LstmModel::initialized(3, rng);
  const auto batch = random_batch(rng, 4, 6);
  const auto out = lstm_forward_batch(model, batch.inputs);
  const double expected = (out - batch.targets).squaredNorm() / 6.0;
  EXPECT_NEAR(lstm_loss_and_gradient(model, batch.inputs, batch.targets, nullptr), expected, 1e-14);
}

}  // namespace
}  // namespace tsleak
