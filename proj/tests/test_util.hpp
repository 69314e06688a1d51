#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <random>
#include <string>
#include <vector>

#include "tsleak/series.hpp"

namespace tsleak::testing {

inline std::filesystem::path data_dir() { return TSLEAK_DATA_DIR; }

inline TimeSeries climate() { return load_csv(data_dir() / "daily_climate.csv", "meantemp"); }

// Scratch file removed at scope exit.
class TempFile {
 public:
  explicit TempFile(const std::string& content, const std::string& suffix = ".csv") {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("tsleak_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + suffix);
    std::ofstream(path_) << content;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> step(0.0, 1.0);
  std::vector<double> v(n);
  double x = 0.0;
  for (auto& e : v) e = (x += step(rng));
  return v;
}

// x_0 .. x_{n-1} = 0 .. n-1, handy for reading indices back out of values.
inline TimeSeries index_series(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
  return TimeSeries::daily("x", v);
}

}  // namespace tsleak::testing
