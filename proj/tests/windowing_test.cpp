#include <gtest/gtest.h>

#include <random>
#include <set>

#include "test_util.hpp"
#include "tsleak/windowing.hpp"

namespace tsleak {
namespace {

// Independent enumerator: try every start position and keep those whose
// target fits in the segment.
std::size_t brute_force_count(std::size_t n, std::size_t w, std::size_t l) {
  std::size_t count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    bool fits = true;
    for (std::size_t j = 0; j < w; ++j) fits = fits && (t + j < n);
    fits = fits && (t + w - 1 + l < n);
    count += fits ? 1 : 0;
  }
  return count;
}

TEST(MakeSequences, CountMatchesBruteForce) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng() % 65, w = 1 + rng() % 12, l = 1 + rng() % 3;
    const std::vector<double> v(n, 1.0);
    const auto set = make_sequences({v, 0}, WindowConfig(w, l));
    EXPECT_EQ(set.size(), brute_force_count(n, w, l)) << n << " " << w << " " << l;
  }
}

TEST(MakeSequences, ClimateCount) {
  const auto series = testing::climate();
  EXPECT_EQ(make_sequences({series.values(), 0}, WindowConfig(10, 1)).size(), 1452u);
}

TEST(MakeSequences, HandEnumeratedPair) {
  const std::vector<double> v{1, 2, 3, 4, 5};
  const auto set = make_sequences({v, 0}, WindowConfig(3, 2));
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set.pairs[0].input, (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(set.pairs[0].target, 5.0);
  EXPECT_EQ(set.pairs[0].target_index, 4u);
}

TEST(MakeSequences, TooShortSegmentIsEmpty) {
  const std::vector<double> v{1, 2, 3};
  EXPECT_TRUE(make_sequences({v, 0}, WindowConfig(3, 1)).empty());
  EXPECT_TRUE(make_sequences({std::span<const double>{}, 0}, WindowConfig(1, 1)).empty());
}

TEST(MakeSequences, OffsetAndProvenance) {
  const auto series = testing::index_series(40);
  const auto seg = series.values().subspan(12, 15);
  const auto set = make_sequences({seg, 12}, WindowConfig(4, 3));
  ASSERT_EQ(set.size(), 15u - 4 - 3 + 1);
  EXPECT_EQ(set.source_ranges, (std::vector<IndexRange>{{12, 27}}));
  for (std::size_t k = 0; k < set.size(); ++k) {
    const auto& p = set.pairs[k];
    EXPECT_EQ(p.input_start, 12 + k);
    EXPECT_EQ(p.target_index, p.input_start + 4 + 3 - 1);
    // Values equal their global index in this series.
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(p.input[j], static_cast<double>(p.input_start + j));
    EXPECT_EQ(p.target, static_cast<double>(p.target_index));
    EXPECT_GE(p.target_index, p.input_start + 4);  // causality
    for (auto i : footprint(p)) EXPECT_TRUE(set.source_ranges[0].contains(i));
  }
}

TEST(MakeSequences, InputsReconstructSegmentPrefix) {
  const auto v = testing::random_walk(50, 9);
  const auto set = make_sequences({v, 0}, WindowConfig(5, 2));
  std::vector<double> rebuilt = set.pairs.front().input;
  for (std::size_t k = 1; k < set.size(); ++k) rebuilt.push_back(set.pairs[k].input.back());
  ASSERT_EQ(rebuilt.size(), set.size() + 4);
  for (std::size_t i = 0; i < rebuilt.size(); ++i) EXPECT_EQ(rebuilt[i], v[i]);
}

TEST(Footprint, Examples) {
  auto fp = [](std::size_t t, std::size_t w, std::size_t l) {
    SequencePair p;
    p.input.assign(w, 0.0);
    p.input_start = t;
    p.target_index = t + w + l - 1;
    return footprint(p);
  };
  EXPECT_EQ(fp(0, 3, 1), (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(fp(5, 3, 3), (std::vector<std::size_t>{5, 6, 7, 10}));
  EXPECT_EQ(fp(0, 1, 1), (std::vector<std::size_t>{0, 1}));
  for (std::size_t w = 1; w < 8; ++w) {
    for (std::size_t l = 1; l < 4; ++l) {
      const auto f = fp(2, w, l);
      EXPECT_EQ(std::set<std::size_t>(f.begin(), f.end()).size(), w + 1);
    }
  }
}

TEST(WindowConfig, RejectsZero) {
  EXPECT_THROW(WindowConfig(0, 1), ConfigError);
  EXPECT_THROW(WindowConfig(3, 0), ConfigError);
}

}  // namespace
}  // namespace tsleak
