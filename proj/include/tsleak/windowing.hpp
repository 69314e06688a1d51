#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tsleak/error.hpp"

namespace tsleak {

// Window geometry shared by every sequence pair in a set.
//   window_size: number of past observations fed to the model.
//   lag_step:    forecast horizon; the target sits lag_step points after the
//                last input, so lag_step == 1 predicts the next observation.
struct WindowConfig {
  std::size_t window_size = 10;
  std::size_t lag_step = 1;

  WindowConfig() = default;
  WindowConfig(std::size_t window, std::size_t lag) : window_size(window), lag_step(lag) {
    validate();
  }

  void validate() const {
    if (window_size < 1) throw ConfigError("window size must be >= 1");
    if (lag_step < 1) throw ConfigError("lag step must be >= 1");
  }

  // Raw points spanned by one pair, inputs through target.
  std::size_t span() const { return window_size + lag_step; }

  bool operator==(const WindowConfig&) const = default;
};

// Half-open interval of raw series indices.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  bool operator==(const IndexRange&) const = default;
};

// One supervised example. Indices are global positions in the originating
// series, which is what makes leakage auditable after partitioning.
struct SequencePair {
  std::vector<double> input;
  double target = 0.0;
  std::size_t input_start = 0;
  std::size_t target_index = 0;

  std::size_t window_size() const { return input.size(); }
  std::size_t last_input_index() const { return input_start + input.size() - 1; }

  bool operator==(const SequencePair&) const = default;
};

struct SequenceSet {
  std::vector<SequencePair> pairs;
  std::vector<IndexRange> source_ranges;
  WindowConfig config;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }

  bool operator==(const SequenceSet&) const = default;
};

// A contiguous slice of a series together with the global index of its first
// element.
struct SeriesSegment {
  std::span<const double> values;
  std::size_t offset = 0;

  IndexRange range() const { return {offset, offset + values.size()}; }
};

// Number of pairs a segment of length n yields: max(0, n - W - L + 1).
inline std::size_t sequence_count(std::size_t n, const WindowConfig& config) {
  const std::size_t need = config.window_size + config.lag_step;
  return n >= need ? n - need + 1 : 0;
}

// Slides a window with stride 1 over the segment. Pair k starts at raw index
// offset + k and targets offset + k + W + L - 1. Segments that are too short
// produce an empty set.
inline SequenceSet make_sequences(SeriesSegment segment, const WindowConfig& config) {
  config.validate();
  SequenceSet set;
  set.config = config;
  set.source_ranges.push_back(segment.range());
  const std::size_t count = sequence_count(segment.values.size(), config);
  set.pairs.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    SequencePair pair;
    const auto window = segment.values.subspan(k, config.window_size);
    pair.input.assign(window.begin(), window.end());
    pair.target = segment.values[k + config.window_size + config.lag_step - 1];
    pair.input_start = segment.offset + k;
    pair.target_index = pair.input_start + config.window_size + config.lag_step - 1;
    set.pairs.push_back(std::move(pair));
  }
  return set;
}

// Raw indices touched by a pair, ascending: the W input positions plus the
// target position. Always W + 1 distinct indices because the lag is >= 1.
inline std::vector<std::size_t> footprint(const SequencePair& pair) {
  std::vector<std::size_t> out;
  out.reserve(pair.input.size() + 1);
  for (std::size_t i = 0; i < pair.input.size(); ++i) out.push_back(pair.input_start + i);
  out.push_back(pair.target_index);
  return out;
}

// Appends the pairs of `more` and records its source ranges. Callers keep the
// input_start ordering by appending later segments after earlier ones.
inline void append(SequenceSet& into, const SequenceSet& more) {
  into.pairs.insert(into.pairs.end(), more.pairs.begin(), more.pairs.end());
  into.source_ranges.insert(into.source_ranges.end(), more.source_ranges.begin(),
                            more.source_ranges.end());
}

}  // namespace tsleak
