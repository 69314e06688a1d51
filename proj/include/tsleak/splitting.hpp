#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tsleak/error.hpp"
#include "tsleak/series.hpp"
#include "tsleak/windowing.hpp"

namespace tsleak {

enum class SplitKind { two_way, three_way, k_fold };

// leaky: window the whole series, then partition the pairs.
// clean: partition the raw series, then window each partition on its own.
enum class Mode { leaky, clean };

enum class Order { sequential, random };

inline std::string_view to_string(SplitKind k) {
  switch (k) {
    case SplitKind::two_way: return "two_way";
    case SplitKind::three_way: return "three_way";
    case SplitKind::k_fold: return "k_fold";
  }
  return "?";
}
inline std::string_view to_string(Mode m) { return m == Mode::leaky ? "leaky" : "clean"; }
inline std::string_view to_string(Order o) {
  return o == Order::sequential ? "sequential" : "random";
}

inline SplitKind parse_split_kind(std::string_view s) {
  if (s == "two_way" || s == "2-way") return SplitKind::two_way;
  if (s == "three_way" || s == "3-way") return SplitKind::three_way;
  if (s == "k_fold" || s == "kfold") return SplitKind::k_fold;
  throw ConfigError("unknown split plan '" + std::string(s) + "'");
}
inline Mode parse_mode(std::string_view s) {
  if (s == "leaky") return Mode::leaky;
  if (s == "clean") return Mode::clean;
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}
inline Order parse_order(std::string_view s) {
  if (s == "sequential") return Order::sequential;
  if (s == "random") return Order::random;
  throw ConfigError("unknown order '" + std::string(s) + "'");
}

struct SplitPlan {
  SplitKind kind = SplitKind::two_way;
  std::vector<double> fractions{0.8, 0.2};  // unused for k_fold
  std::size_t k = 10;                       // used only for k_fold

  static SplitPlan two_way(double train = 0.8, double test = 0.2) {
    SplitPlan p{SplitKind::two_way, {train, test}, 0};
    p.validate();
    return p;
  }
  static SplitPlan three_way(double train = 0.7, double val = 0.1, double test = 0.2) {
    SplitPlan p{SplitKind::three_way, {train, val, test}, 0};
    p.validate();
    return p;
  }
  static SplitPlan k_fold(std::size_t k = 10) {
    SplitPlan p{SplitKind::k_fold, {}, k};
    p.validate();
    return p;
  }

  void validate() const {
    if (kind == SplitKind::k_fold) {
      if (k < 2) throw ConfigError("k-fold plan needs k >= 2, got " + std::to_string(k));
      return;
    }
    const std::size_t expected = kind == SplitKind::two_way ? 2 : 3;
    if (fractions.size() != expected) {
      throw ConfigError(std::string(to_string(kind)) + " plan needs " + std::to_string(expected) +
                        " fractions");
    }
    double sum = 0.0;
    for (double f : fractions) {
      if (!(f > 0.0)) throw ConfigError("split fractions must be positive");
      sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
  }

  // Short label used in reports: "2-way", "3-way", "10-fold".
  std::string label() const {
    switch (kind) {
      case SplitKind::two_way: return "2-way";
      case SplitKind::three_way: return "3-way";
      case SplitKind::k_fold: return std::to_string(k) + "-fold";
    }
    return "?";
  }

  bool operator==(const SplitPlan&) const = default;
};

// "2-way" / "3-way" / "<k>-fold" back to a plan with default fractions.
inline std::optional<SplitPlan> plan_from_label(std::string_view s) {
  if (s == "2-way") return SplitPlan::two_way();
  if (s == "3-way") return SplitPlan::three_way();
  if (s.size() > 5 && s.substr(s.size() - 5) == "-fold") {
    std::size_t k = 0;
    const auto digits = s.substr(0, s.size() - 5);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && k >= 2) {
      return SplitPlan::k_fold(k);
    }
  }
  return std::nullopt;
}

struct SplitSpec {
  SplitPlan plan;
  Mode mode = Mode::clean;
  Order order = Order::sequential;
  WindowConfig window;
  std::optional<std::uint64_t> seed;

  void validate() const {
    plan.validate();
    window.validate();
    if (mode == Mode::clean && order == Order::random) {
      throw ConfigError("clean mode requires sequential order: shuffling raw points breaks "
                        "the contiguity windows need");
    }
  }
};

struct SplitResult {
  SequenceSet train;
  std::optional<SequenceSet> val;
  SequenceSet test;
  std::size_t fold_index = 0;

  bool operator==(const SplitResult&) const = default;
};

// Sizes of the contiguous partitions for n items. Train (and val) are floored,
// the remainder goes to test. The tiny epsilon keeps 0.7 * 10 from flooring to 6.
inline std::vector<std::size_t> partition_sizes(std::size_t n, const SplitPlan& plan) {
  plan.validate();
  if (plan.kind == SplitKind::k_fold) throw ConfigError("partition_sizes: not a holdout plan");
  std::vector<std::size_t> sizes;
  std::size_t used = 0;
  for (std::size_t i = 0; i + 1 < plan.fractions.size(); ++i) {
    const auto s = static_cast<std::size_t>(std::floor(plan.fractions[i] * static_cast<double>(n) + 1e-9));
    sizes.push_back(s);
    used += s;
  }
  sizes.push_back(n - std::min(used, n));
  return sizes;
}

// k contiguous blocks covering [0, n); the first n mod k blocks get one extra.
inline std::vector<IndexRange> fold_blocks(std::size_t n, std::size_t k) {
  if (k < 2) throw ConfigError("k-fold needs k >= 2");
  if (k > n) {
    throw DataError("cannot cut " + std::to_string(n) + " items into " + std::to_string(k) +
                    " folds");
  }
  std::vector<IndexRange> blocks;
  const std::size_t base = n / k, extra = n % k;
  std::size_t at = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    blocks.push_back({at, at + len});
    at += len;
  }
  return blocks;
}

namespace detail {

inline void require_non_empty(const SequenceSet& set, std::string_view partition,
                              std::string_view unit, std::size_t length, std::size_t fold) {
  if (!set.empty()) return;
  std::string msg = "empty " + std::string(partition) + " partition";
  if (fold != static_cast<std::size_t>(-1)) msg += " in fold " + std::to_string(fold);
  msg += " (" + std::string(unit) + " length " + std::to_string(length) + ")";
  throw DataError(msg);
}

inline SequenceSet subset(const SequenceSet& all, const std::vector<std::size_t>& order,
                          std::size_t begin, std::size_t end) {
  SequenceSet out;
  out.config = all.config;
  out.source_ranges = all.source_ranges;
  std::vector<std::size_t> picked(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                  order.begin() + static_cast<std::ptrdiff_t>(end));
  std::sort(picked.begin(), picked.end());
  out.pairs.reserve(picked.size());
  for (std::size_t i : picked) out.pairs.push_back(all.pairs[i]);
  return out;
}

inline std::vector<SplitResult> split_leaky(const TimeSeries& series, const SplitSpec& spec) {
  const SequenceSet all = make_sequences({series.values(), 0}, spec.window);
  const std::size_t n = all.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (spec.order == Order::random) {
    std::mt19937_64 rng(spec.seed ? *spec.seed : std::random_device{}());
    std::shuffle(order.begin(), order.end(), rng);
  }
  constexpr auto kNoFold = static_cast<std::size_t>(-1);

  std::vector<SplitResult> results;
  if (spec.plan.kind == SplitKind::k_fold) {
    const auto blocks = fold_blocks(n, spec.plan.k);
    for (std::size_t f = 0; f < blocks.size(); ++f) {
      std::vector<std::size_t> rest;
      rest.reserve(n - blocks[f].size());
      rest.insert(rest.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(blocks[f].begin));
      rest.insert(rest.end(), order.begin() + static_cast<std::ptrdiff_t>(blocks[f].end), order.end());
      SplitResult r;
      r.fold_index = f;
      r.test = subset(all, order, blocks[f].begin, blocks[f].end);
      r.train = subset(all, rest, 0, rest.size());
      require_non_empty(r.train, "train", "pair", r.train.size(), f);
      require_non_empty(r.test, "test", "pair", blocks[f].size(), f);
      results.push_back(std::move(r));
    }
    return results;
  }

  const auto sizes = partition_sizes(n, spec.plan);
  SplitResult r;
  std::size_t at = 0;
  r.train = subset(all, order, at, at + sizes[0]);
  require_non_empty(r.train, "train", "pair", sizes[0], kNoFold);
  at += sizes[0];
  if (spec.plan.kind == SplitKind::three_way) {
    r.val = subset(all, order, at, at + sizes[1]);
    require_non_empty(*r.val, "validation", "pair", sizes[1], kNoFold);
    at += sizes[1];
  }
  r.test = subset(all, order, at, n);
  require_non_empty(r.test, "test", "pair", n - at, kNoFold);
  results.push_back(std::move(r));
  return results;
}

inline std::vector<SplitResult> split_clean(const TimeSeries& series, const SplitSpec& spec) {
  const auto values = series.values();
  const std::size_t n = values.size();
  auto window_range = [&](IndexRange range) {
    return make_sequences({values.subspan(range.begin, range.size()), range.begin}, spec.window);
  };
  constexpr auto kNoFold = static_cast<std::size_t>(-1);

  std::vector<SplitResult> results;
  if (spec.plan.kind == SplitKind::k_fold) {
    const auto blocks = fold_blocks(n, spec.plan.k);
    for (std::size_t f = 0; f < blocks.size(); ++f) {
      SplitResult r;
      r.fold_index = f;
      r.test = window_range(blocks[f]);
      r.train.config = spec.window;
      // Windows never cross a block boundary: each run of remaining blocks
      // is windowed on its own.
      for (const IndexRange run : {IndexRange{0, blocks[f].begin}, IndexRange{blocks[f].end, n}}) {
        if (run.size() > 0) append(r.train, window_range(run));
      }
      require_non_empty(r.train, "train", "raw", n - blocks[f].size(), f);
      require_non_empty(r.test, "test", "raw", blocks[f].size(), f);
      results.push_back(std::move(r));
    }
    return results;
  }

  const auto sizes = partition_sizes(n, spec.plan);
  SplitResult r;
  IndexRange range{0, sizes[0]};
  r.train = window_range(range);
  require_non_empty(r.train, "train", "raw", range.size(), kNoFold);
  if (spec.plan.kind == SplitKind::three_way) {
    range = {range.end, range.end + sizes[1]};
    r.val = window_range(range);
    require_non_empty(*r.val, "validation", "raw", range.size(), kNoFold);
  }
  range = {range.end, n};
  r.test = window_range(range);
  require_non_empty(r.test, "test", "raw", range.size(), kNoFold);
  results.push_back(std::move(r));
  return results;
}

}  // namespace detail

// Materializes the train/val/test sets for a validation plan. Holdout plans
// yield one result; k-fold yields k results, fold i testing on block i.
inline std::vector<SplitResult> split(const TimeSeries& series, const SplitSpec& spec) {
  spec.validate();
  return spec.mode == Mode::leaky ? detail::split_leaky(series, spec)
                                  : detail::split_clean(series, spec);
}

inline std::string describe_split(const SplitResult& result) {
  auto span_of = [](const SequenceSet& set) -> std::string {
    if (set.empty()) return "[]";
    std::size_t lo = set.pairs.front().input_start, hi = set.pairs.front().target_index;
    for (const auto& p : set.pairs) {
      lo = std::min(lo, p.input_start);
      hi = std::max(hi, p.target_index);
    }
    return "[" + std::to_string(lo) + ".." + std::to_string(hi) + "]";
  };
  auto raw_of = [](const SequenceSet& set) {
    std::size_t raw = 0;
    for (const auto& r : set.source_ranges) raw += r.size();
    return raw;
  };
  std::ostringstream out;
  out << "fold " << result.fold_index << ": train " << result.train.size() << " pairs (raw "
      << raw_of(result.train) << ", footprint " << span_of(result.train) << ")";
  if (result.val) {
    out << ", val " << result.val->size() << " pairs (raw " << raw_of(*result.val)
        << ", footprint " << span_of(*result.val) << ")";
  }
  out << ", test " << result.test.size() << " pairs (raw " << raw_of(result.test)
      << ", footprint " << span_of(result.test) << ")";
  return out.str();
}

}  // namespace tsleak
