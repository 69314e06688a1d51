#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "test_util.hpp"
#include "tsleak/decomposition.hpp"

namespace tsleak {
namespace {

void expect_reconstructs(std::span<const double> x, const Decomposition& d) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!d.trend_defined(i)) continue;
    EXPECT_NEAR(d.trend[i] + d.seasonal[i] + d.residual[i], x[i], 1e-9) << "at " << i;
  }
}

TEST(SeasonalDecompose, RecoversPureSine) {
  std::vector<double> x(120);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * M_PI * static_cast<double>(i) / 12.0);
  const auto d = seasonal_decompose(x, 12);
  for (std::size_t i = 6; i + 6 < x.size(); ++i) {
    ASSERT_TRUE(d.trend_defined(i));
    EXPECT_NEAR(d.trend[i], 0.0, 1e-9);
    EXPECT_NEAR(d.seasonal[i], x[i], 1e-6);
  }
  expect_reconstructs(x, d);
}

TEST(SeasonalDecompose, LinearRampHasNoSeasonality) {
  std::vector<double> x(70);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 3.0 + 0.25 * static_cast<double>(i);
  const auto d = seasonal_decompose(x, 7);
  for (double s : d.seasonal) EXPECT_LT(std::abs(s), 1e-9);
  for (std::size_t i = 3; i + 3 < x.size(); ++i) EXPECT_NEAR(d.trend[i], x[i], 1e-9);
  expect_reconstructs(x, d);
}

TEST(SeasonalDecompose, ConstantSeries) {
  const std::vector<double> x(30, 4.0);
  const auto d = seasonal_decompose(x, 6);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_DOUBLE_EQ(d.seasonal[i], 0.0);
    if (d.trend_defined(i)) {
      EXPECT_DOUBLE_EQ(d.trend[i], 4.0);
      EXPECT_NEAR(d.residual[i], 0.0, 1e-12);
    }
  }
}

TEST(SeasonalDecompose, EdgePolicyLeavesHalfPeriodUndefined) {
  const std::vector<double> x(40, 1.0);
  const auto even = seasonal_decompose(x, 8);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_FALSE(even.trend_defined(i));
    EXPECT_FALSE(even.trend_defined(x.size() - 1 - i));
  }
  EXPECT_TRUE(even.trend_defined(4));
  EXPECT_TRUE(even.trend_defined(x.size() - 5));
  const auto odd = seasonal_decompose(x, 7);
  EXPECT_FALSE(odd.trend_defined(2));
  EXPECT_TRUE(odd.trend_defined(3));
}

TEST(SeasonalDecompose, ClimateInvariants) {
  const auto series = testing::climate();
  const auto d = seasonal_decompose(series, 365);
  expect_reconstructs(series.values(), d);
  const double one_period = std::accumulate(d.seasonal.begin(), d.seasonal.begin() + 365, 0.0);
  EXPECT_LT(std::abs(one_period), 1e-6 * 365 * describe(series).std_dev);
}

TEST(SeasonalDecompose, RejectsShortSeries) {
  const std::vector<double> x(23, 1.0);
  EXPECT_THROW(seasonal_decompose(x, 12), DataError);
  EXPECT_THROW(seasonal_decompose(x, 0), ConfigError);
}

}  // namespace
}  // namespace tsleak
