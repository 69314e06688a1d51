#include <gtest/gtest.h>
#include <unistd.h>

#include <algorithm>
#include <random>

#include "test_util.hpp"
#include "tsleak/series.hpp"

namespace tsleak {
namespace {

using testing::TempFile;

TEST(LoadCsv, ReferenceClimateSeries) {
  const auto series = testing::climate();
  EXPECT_EQ(series.size(), 1462u);
  EXPECT_EQ(format_date(series.timestamps().front()), "2013-01-01");
  EXPECT_EQ(format_date(series.timestamps().back()), "2017-01-01");
}

TEST(LoadCsv, ThreeRows) {
  TempFile f("date,value\n2013-01-01,1\n2013-01-02,2\n2013-01-03,3\n");
  const auto series = load_csv(f.path(), "value");
  ASSERT_EQ(series.size(), 3u);
  EXPECT_EQ(std::vector<double>(series.values().begin(), series.values().end()),
            (std::vector<double>{1, 2, 3}));
}

TEST(LoadCsv, ExtraColumnsAndQuotes) {
  TempFile f("\"date\",meantemp,humidity\n\"2013-01-01\",10.5,84\n2013-01-02,  7.4 ,92\n");
  const auto series = load_csv(f.path(), "meantemp");
  ASSERT_EQ(series.size(), 2u);
  EXPECT_DOUBLE_EQ(series[1], 7.4);
}

TEST(LoadCsv, Errors) {
  auto message_of = [](const std::string& content) {
    TempFile f(content);
    try {
      load_csv(f.path(), "v");
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message_of("").find("no data rows"), std::string::npos);
  EXPECT_NE(message_of("date,v\n").find("no data rows"), std::string::npos);
  EXPECT_NE(message_of("date,w\n2013-01-01,1\n").find("missing column 'v'"), std::string::npos);
  EXPECT_NE(message_of("date,v\n2013-01-01,1\n2013-01-02,abc\n").find("row 3"), std::string::npos);
  EXPECT_NE(message_of("date,v\n2013-13-01,1\n").find("unparseable date"), std::string::npos);
  EXPECT_NE(message_of("date,v\n2013-01-01,1\n2013-01-01,2\n").find("duplicate"), std::string::npos);
  EXPECT_NE(message_of("date,v\n2013-01-02,1\n2013-01-01,2\n").find("out-of-order"), std::string::npos);
  EXPECT_NE(message_of("date,v\n2013-01-01,nan\n").find("non-finite"), std::string::npos);
  EXPECT_NE(message_of("date,v\n2013-01-01,inf\n").find("non-finite"), std::string::npos);
  EXPECT_THROW(load_csv("/nonexistent/file.csv", "v"), DataError);
}

TEST(LoadCsv, RoundTripsThroughWriteCsv) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> v(1 + rng() % 200);
    for (auto& x : v) x = dist(rng);
    const auto original = TimeSeries::daily("temp", v);
    TempFile f("");
    write_csv(original, f.path());
    EXPECT_EQ(load_csv(f.path(), "temp"), original);
  }
}

TEST(TimeSeries, RejectsBrokenInvariants) {
  EXPECT_THROW(TimeSeries::daily("x", {}), DataError);
  EXPECT_THROW(TimeSeries::daily("x", {1.0, std::nan("")}), DataError);
  const Date d{std::chrono::year{2020}, std::chrono::March, std::chrono::day{1}};
  EXPECT_THROW(TimeSeries("x", {d, d}, {1.0, 2.0}), DataError);
  EXPECT_THROW(TimeSeries("x", {d}, {1.0, 2.0}), DataError);
}

TEST(Describe, ReferenceClimateSummary) {
  const auto s = describe(testing::climate());
  EXPECT_EQ(s.count, 1462u);
  EXPECT_NEAR(s.mean, 25.5, 0.01);
  EXPECT_NEAR(s.std_dev, 7.35, 0.01);
  EXPECT_NEAR(s.min, 6.00, 0.01);
  EXPECT_NEAR(s.max, 38.71, 0.01);
}

TEST(Describe, ConstantSeries) {
  const std::vector<double> v{5, 5, 5};
  const auto s = describe(v);
  EXPECT_EQ(s.mean, 5.0);
  EXPECT_EQ(s.std_dev, 0.0);
  EXPECT_EQ(s.min, 5.0);
  EXPECT_EQ(s.median, 5.0);
  EXPECT_EQ(s.max, 5.0);
}

TEST(Describe, MedianMidpointForEvenLength) {
  const std::vector<double> v{4, 1, 3, 2};
  EXPECT_EQ(describe(v).median, 2.5);
  const std::vector<double> odd{9, 1, 5};
  EXPECT_EQ(describe(odd).median, 5.0);
}

TEST(Describe, MeanAndStdArePermutationInvariant) {
  auto v = testing::random_walk(101, 3);
  const auto a = describe(v);
  std::mt19937 rng(5);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(v.begin(), v.end(), rng);
    const auto b = describe(v);
    EXPECT_NEAR(a.mean, b.mean, 1e-9);
    EXPECT_NEAR(a.std_dev, b.std_dev, 1e-9);
    EXPECT_EQ(a.median, b.median);
    EXPECT_LE(b.min, b.median);
    EXPECT_LE(b.median, b.max);
  }
}

}  // namespace
}  // namespace tsleak
