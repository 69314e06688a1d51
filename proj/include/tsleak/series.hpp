#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsleak/detail/text.hpp"
#include "tsleak/error.hpp"

namespace tsleak {

using Date = std::chrono::year_month_day;

// Parses an ISO-8601 calendar date (YYYY-MM-DD). Returns nullopt on anything
// else, including impossible dates such as 2013-02-30.
inline std::optional<Date> parse_date(std::string_view text) {
  text = detail::trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  auto digits = [](std::string_view s, auto& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
  };
  if (!digits(text.substr(0, 4), y) || !digits(text.substr(5, 2), m) ||
      !digits(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

inline std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

// An ordered univariate series with one observation per calendar date.
// Construction validates the invariants, so every TimeSeries in the program
// is non-empty, finite and strictly increasing in time.
class TimeSeries {
 public:
  TimeSeries(std::string name, std::vector<Date> timestamps, std::vector<double> values)
      : name_(std::move(name)), timestamps_(std::move(timestamps)), values_(std::move(values)) {
    if (values_.empty()) throw DataError("time series '" + name_ + "' has no observations");
    if (timestamps_.size() != values_.size()) {
      throw DataError("time series '" + name_ + "': " + std::to_string(timestamps_.size()) +
                      " timestamps but " + std::to_string(values_.size()) + " values");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw DataError("time series '" + name_ + "': non-finite value at index " +
                        std::to_string(i));
      }
      if (i > 0 && !(timestamps_[i - 1] < timestamps_[i])) {
        throw DataError("time series '" + name_ + "': timestamps not strictly increasing at index " +
                        std::to_string(i) + " (" + format_date(timestamps_[i]) + ")");
      }
    }
  }

  // Convenience for synthetic data: consecutive days starting at `start`.
  static TimeSeries daily(std::string name, std::vector<double> values,
                          Date start = Date{std::chrono::year{2000}, std::chrono::January,
                                            std::chrono::day{1}}) {
    std::vector<Date> stamps;
    stamps.reserve(values.size());
    const std::chrono::sys_days first{start};
    for (std::size_t i = 0; i < values.size(); ++i) {
      stamps.emplace_back(first + std::chrono::days{static_cast<long>(i)});
    }
    return TimeSeries(std::move(name), std::move(stamps), std::move(values));
  }

  const std::string& name() const { return name_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<const Date> timestamps() const { return timestamps_; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool operator==(const TimeSeries&) const = default;

 private:
  std::string name_;
  std::vector<Date> timestamps_;
  std::vector<double> values_;
};

struct DescriptiveStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // sample (n - 1) standard deviation; 0 for a single value
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

inline DescriptiveStats describe(std::span<const double> values) {
  if (values.empty()) throw DataError("describe: empty series");
  DescriptiveStats s;
  s.count = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_dev = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  const std::size_t mid = s.count / 2;
  s.median = (s.count % 2 == 1) ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

inline DescriptiveStats describe(const TimeSeries& series) { return describe(series.values()); }

// Reads a comma-separated file with a header row. Only the date and value
// columns are used; other columns are ignored. Rows must already be in
// chronological order.
inline TimeSeries load_csv(const std::filesystem::path& path, std::string_view value_column,
                           std::string_view date_column = "date") {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "': no data rows");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = detail::split_csv_line(line);
  auto column_index = [&](std::string_view name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw DataError("'" + path.string() + "': missing column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t date_idx = column_index(date_column);
  const std::size_t value_idx = column_index(value_column);

  std::vector<Date> stamps;
  std::vector<double> values;
  std::size_t row = 1;  // 1-based file line number of the header
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    const auto where = "'" + path.string() + "' row " + std::to_string(row) + ": ";
    if (fields.size() <= std::max(date_idx, value_idx)) {
      throw DataError(where + "expected at least " +
                      std::to_string(std::max(date_idx, value_idx) + 1) + " fields");
    }
    const auto date = parse_date(fields[date_idx]);
    if (!date) throw DataError(where + "unparseable date '" + std::string(fields[date_idx]) + "'");
    double value = 0.0;
    if (!detail::parse_double(fields[value_idx], value)) {
      throw DataError(where + "unparseable value '" + std::string(fields[value_idx]) + "'");
    }
    if (!std::isfinite(value)) throw DataError(where + "non-finite value");
    if (!stamps.empty()) {
      if (*date == stamps.back()) throw DataError(where + "duplicate date " + format_date(*date));
      if (*date < stamps.back()) {
        throw DataError(where + "out-of-order date " + format_date(*date));
      }
    }
    stamps.push_back(*date);
    values.push_back(value);
  }
  if (values.empty()) throw DataError("'" + path.string() + "': no data rows");
  return TimeSeries(std::string(value_column), std::move(stamps), std::move(values));
}

inline void write_csv(const TimeSeries& series, const std::filesystem::path& path,
                      std::string_view date_column = "date") {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << date_column << ',' << series.name() << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_date(series.timestamps()[i]) << ',' << detail::format_double(series[i]) << '\n';
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace tsleak
