#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsleak/error.hpp"
#include "tsleak/splitting.hpp"
#include "tsleak/windowing.hpp"

namespace tsleak {

// Train/test contamination measured on raw series indices. The train side
// includes validation pairs: anything the model sees before testing.
struct AuditReport {
  std::size_t train_footprint_size = 0;
  std::size_t test_footprint_size = 0;
  std::size_t overlap_count = 0;
  std::vector<std::size_t> overlap_sample;  // smallest overlapping indices, at most 20
  bool is_contaminated = false;
  std::size_t contaminated_test_pairs = 0;

  bool operator==(const AuditReport&) const = default;
};

inline constexpr std::size_t kOverlapSampleSize = 20;

namespace detail {

inline std::size_t max_index(const SequenceSet& set, std::size_t acc) {
  for (const auto& p : set.pairs) acc = std::max(acc, p.target_index);
  return acc;
}

// Marks every index in every footprint of `set`.
inline void mark(const SequenceSet& set, std::vector<char>& mask) {
  for (const auto& p : set.pairs) {
    std::fill(mask.begin() + static_cast<std::ptrdiff_t>(p.input_start),
              mask.begin() + static_cast<std::ptrdiff_t>(p.input_start + p.input.size()), 1);
    mask[p.target_index] = 1;
  }
}

}  // namespace detail

inline AuditReport audit(const SplitResult& result) {
  std::size_t top = detail::max_index(result.train, 0);
  if (result.val) top = detail::max_index(*result.val, top);
  top = detail::max_index(result.test, top);

  std::vector<char> seen(top + 1, 0), tested(top + 1, 0);
  detail::mark(result.train, seen);
  if (result.val) detail::mark(*result.val, seen);
  detail::mark(result.test, tested);

  AuditReport report;
  for (std::size_t i = 0; i <= top; ++i) {
    report.train_footprint_size += seen[i];
    report.test_footprint_size += tested[i];
    if (seen[i] && tested[i]) {
      ++report.overlap_count;
      if (report.overlap_sample.size() < kOverlapSampleSize) report.overlap_sample.push_back(i);
    }
  }
  for (const auto& p : result.test.pairs) {
    bool hit = seen[p.target_index] != 0;
    for (std::size_t i = 0; !hit && i < p.input.size(); ++i) hit = seen[p.input_start + i] != 0;
    report.contaminated_test_pairs += hit ? 1 : 0;
  }
  report.is_contaminated = report.overlap_count > 0;
  return report;
}

namespace detail {

// Largest distance from any footprint index of `pair` to [lo, hi].
inline std::size_t reach(const SequencePair& pair, std::size_t lo, std::size_t hi) {
  auto dist = [&](std::size_t i) -> std::size_t {
    if (i < lo) return lo - i;
    if (i > hi) return i - hi;
    return 0;
  };
  return std::max(dist(pair.input_start), dist(pair.target_index));
}

inline std::size_t drop_near(SequenceSet& set, std::size_t lo, std::size_t hi, std::size_t gap) {
  const auto before = set.pairs.size();
  std::erase_if(set.pairs, [&](const SequencePair& p) { return reach(p, lo, hi) <= gap; });
  return before - set.pairs.size();
}

}  // namespace detail

// Buffer zone around the test region. A train (or validation) pair is dropped
// when its whole footprint lies within `gap` indices of the test footprint's
// [min, max] range, i.e. the pair starts within `gap` of the test region on
// the left or its target lands within `gap` of it on the right. gap = 0 only
// drops pairs fully inside the test range. The test set is untouched.
inline SplitResult apply_buffer(const SplitResult& result, std::size_t gap) {
  SplitResult out = result;
  if (result.test.empty()) return out;
  std::size_t lo = result.test.pairs.front().input_start, hi = 0;
  for (const auto& p : result.test.pairs) {
    lo = std::min(lo, p.input_start);
    hi = std::max(hi, p.target_index);
  }
  detail::drop_near(out.train, lo, hi, gap);
  if (out.train.empty()) {
    throw DataError("empty train set after buffer of " + std::to_string(gap) + " indices");
  }
  if (out.val) {
    detail::drop_near(*out.val, lo, hi, gap);
    if (out.val->empty()) {
      throw DataError("empty validation set after buffer of " + std::to_string(gap) + " indices");
    }
  }
  return out;
}

// Smallest buffer that leaves the split uncontaminated, by linear scan.
inline std::size_t minimal_clearing_gap(const SplitResult& result) {
  std::size_t top = detail::max_index(result.train, 0);
  if (result.val) top = detail::max_index(*result.val, top);
  top = detail::max_index(result.test, top);
  for (std::size_t gap = 0; gap <= top + 1; ++gap) {
    SplitResult buffered;
    try {
      buffered = apply_buffer(result, gap);
    } catch (const DataError&) {
      break;
    }
    if (!audit(buffered).is_contaminated) return gap;
  }
  throw DataError("no buffer clears contamination before the train set is exhausted");
}

inline void to_json(nlohmann::json& j, const AuditReport& r) {
  j = nlohmann::json{{"train_footprint_size", r.train_footprint_size},
                     {"test_footprint_size", r.test_footprint_size},
                     {"overlap_count", r.overlap_count},
                     {"overlap_sample", r.overlap_sample},
                     {"is_contaminated", r.is_contaminated},
                     {"contaminated_test_pairs", r.contaminated_test_pairs}};
}

inline void from_json(const nlohmann::json& j, AuditReport& r) {
  j.at("train_footprint_size").get_to(r.train_footprint_size);
  j.at("test_footprint_size").get_to(r.test_footprint_size);
  j.at("overlap_count").get_to(r.overlap_count);
  j.at("overlap_sample").get_to(r.overlap_sample);
  j.at("is_contaminated").get_to(r.is_contaminated);
  j.at("contaminated_test_pairs").get_to(r.contaminated_test_pairs);
}

}  // namespace tsleak
