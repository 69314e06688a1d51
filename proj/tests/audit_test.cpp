#include <gtest/gtest.h>

#include <random>
#include <set>

#include "test_util.hpp"
#include "tsleak/audit.hpp"

namespace tsleak {
namespace {

// Naive oracle: enumerate every footprint into std::set and intersect.
struct OracleAudit {
  std::set<std::size_t> overlap;
  std::size_t contaminated_pairs = 0;
};

OracleAudit oracle(const SplitResult& r) {
  std::set<std::size_t> train, test;
  auto add = [](const SequenceSet& s, std::set<std::size_t>& into) {
    for (const auto& p : s.pairs) {
      for (std::size_t j = 0; j < p.input.size(); ++j) into.insert(p.input_start + j);
      into.insert(p.input_start + p.input.size() - 1 + s.config.lag_step);
    }
  };
  add(r.train, train);
  if (r.val) add(*r.val, train);
  add(r.test, test);
  OracleAudit out;
  for (auto i : test) {
    if (train.count(i)) out.overlap.insert(i);
  }
  for (const auto& p : r.test.pairs) {
    bool hit = train.count(p.target_index) > 0;
    for (std::size_t j = 0; j < p.input.size(); ++j) hit = hit || train.count(p.input_start + j) > 0;
    out.contaminated_pairs += hit;
  }
  return out;
}

SplitSpec spec(SplitPlan plan, Mode mode, std::size_t w, std::size_t l) {
  return {plan, mode, Order::sequential, WindowConfig(w, l), 1};
}

TEST(Audit, TenPointLeakyExample) {
  const auto r = split(testing::index_series(10), spec(SplitPlan::two_way(), Mode::leaky, 3, 1)).at(0);
  const auto report = audit(r);
  EXPECT_EQ(report.overlap_count, 3u);
  EXPECT_EQ(report.overlap_sample, (std::vector<std::size_t>{5, 6, 7}));
  EXPECT_TRUE(report.is_contaminated);
  EXPECT_EQ(report.train_footprint_size, 8u);
  EXPECT_EQ(report.test_footprint_size, 5u);
  EXPECT_EQ(report.contaminated_test_pairs, 2u);
}

TEST(Audit, LeakyTenFoldFiftyPoints) {
  const auto folds = split(testing::index_series(50), spec(SplitPlan::k_fold(10), Mode::leaky, 5, 1));
  const auto expected = oracle(folds[0]);
  // Fold 0 tests pairs t = 0..4 (footprint 0..9); training starts at t = 5.
  EXPECT_EQ(expected.overlap, (std::set<std::size_t>{5, 6, 7, 8, 9}));
  const auto report = audit(folds[0]);
  EXPECT_EQ(report.overlap_count, 5u);
  EXPECT_EQ(report.overlap_count, expected.overlap.size());
}

TEST(Audit, MatchesOracleOnSmallInstances) {
  std::mt19937_64 rng(7);
  std::size_t checked = 0;
  for (std::size_t n = 12; n <= 64; n += 4) {
    for (std::size_t w = 1; w <= 6; ++w) {
      for (std::size_t l = 1; l <= 3; ++l) {
        for (Mode mode : {Mode::leaky, Mode::clean}) {
          for (const auto& plan : {SplitPlan::two_way(), SplitPlan::three_way(), SplitPlan::k_fold(3)}) {
            std::vector<SplitResult> results;
            try {
              results = split(testing::index_series(n), spec(plan, mode, w, l));
            } catch (const DataError&) {
              continue;
            }
            for (const auto& r : results) {
              const auto expected = oracle(r);
              const auto report = audit(r);
              ASSERT_EQ(report.overlap_count, expected.overlap.size());
              ASSERT_EQ(report.contaminated_test_pairs, expected.contaminated_pairs);
              std::vector<std::size_t> sample(expected.overlap.begin(), expected.overlap.end());
              if (sample.size() > kOverlapSampleSize) sample.resize(kOverlapSampleSize);
              ASSERT_EQ(report.overlap_sample, sample);
              if (mode == Mode::clean) ASSERT_EQ(report.overlap_count, 0u);
              ++checked;
            }
          }
        }
      }
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(Audit, CleanClimateSplitsAreUncontaminated) {
  const auto series = testing::climate();
  for (const auto& plan : {SplitPlan::two_way(), SplitPlan::three_way(), SplitPlan::k_fold(10)}) {
    for (const auto& r : split(series, spec(plan, Mode::clean, 10, 3))) {
      EXPECT_EQ(audit(r).overlap_count, 0u);
    }
  }
}

TEST(Audit, JsonRoundTrip) {
  const auto r = split(testing::index_series(10), spec(SplitPlan::two_way(), Mode::leaky, 3, 1)).at(0);
  const auto report = audit(r);
  const nlohmann::json j = report;
  EXPECT_EQ(j.get<AuditReport>(), report);
}

TEST(ApplyBuffer, GapZeroLeavesTenPointExampleUnchanged) {
  const auto r = split(testing::index_series(10), spec(SplitPlan::two_way(), Mode::leaky, 3, 1)).at(0);
  EXPECT_EQ(apply_buffer(r, 0), r);
}

TEST(ApplyBuffer, WindowPlusLagClearsTenPointExample) {
  const auto r = split(testing::index_series(10), spec(SplitPlan::two_way(), Mode::leaky, 3, 1)).at(0);
  const auto buffered = apply_buffer(r, 4);
  EXPECT_EQ(audit(buffered).overlap_count, 0u);
  EXPECT_EQ(oracle(buffered).overlap.size(), 0u);
  EXPECT_EQ(buffered.test, r.test);
  EXPECT_LT(buffered.train.size(), r.train.size());
}

TEST(ApplyBuffer, OversizedGapEmptiesTrain) {
  const auto r = split(testing::index_series(10), spec(SplitPlan::two_way(), Mode::leaky, 3, 1)).at(0);
  try {
    apply_buffer(r, 100);
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("empty train set"), std::string::npos);
  }
}

// Scan oracle: smallest g whose buffered split the naive oracle calls clean.
std::optional<std::size_t> scan_oracle(const SplitResult& r) {
  for (std::size_t g = 0; g < 200; ++g) {
    try {
      if (oracle(apply_buffer(r, g)).overlap.empty()) return g;
    } catch (const DataError&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

TEST(MinimalClearingGap, TenPointExample) {
  const auto r = split(testing::index_series(10), spec(SplitPlan::two_way(), Mode::leaky, 3, 1)).at(0);
  const auto expected = scan_oracle(r);
  ASSERT_TRUE(expected);
  EXPECT_EQ(*expected, 3u);
  EXPECT_EQ(minimal_clearing_gap(r), *expected);
}

TEST(MinimalClearingGap, CleanSplitIsZero) {
  const auto r = split(testing::climate(), spec(SplitPlan::two_way(), Mode::clean, 10, 1)).at(0);
  EXPECT_EQ(minimal_clearing_gap(r), 0u);
}

TEST(MinimalClearingGap, BoundedByWindowPlusLag) {
  const auto series = testing::index_series(200);
  for (std::size_t w = 2; w <= 12; ++w) {
    const auto r = split(series, spec(SplitPlan::two_way(), Mode::leaky, w, 1)).at(0);
    ASSERT_TRUE(audit(r).is_contaminated);
    const auto gap = minimal_clearing_gap(r);
    EXPECT_LE(gap, w + 1);
    EXPECT_EQ(gap, *scan_oracle(r));
    EXPECT_FALSE(audit(apply_buffer(r, w + 1)).is_contaminated);
  }
}

TEST(ApplyBuffer, ClearsEveryClimateLeakySplitAtWindowPlusLag) {
  const auto series = testing::climate();
  for (std::size_t w : {3, 7, 10}) {
    for (std::size_t l : {1, 2, 3}) {
      for (const auto& plan : {SplitPlan::two_way(), SplitPlan::three_way(), SplitPlan::k_fold(10)}) {
        for (const auto& r : split(series, spec(plan, Mode::leaky, w, l))) {
          if (!audit(r).is_contaminated) continue;
          EXPECT_LE(minimal_clearing_gap(r), w + l);
          EXPECT_FALSE(audit(apply_buffer(r, w + l)).is_contaminated);
        }
      }
    }
  }
}

}  // namespace
}  // namespace tsleak
