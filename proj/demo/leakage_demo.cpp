// Windows a short synthetic series both ways, audits the splits, and shows
// how a buffer zone clears the leaky one.

#include <cmath>
#include <iostream>
#include <vector>

#include "tsleak/tsleak.hpp"

int main() {
  std::vector<double> values;
  for (int t = 0; t < 120; ++t) values.push_back(20.0 + 8.0 * std::sin(2.0 * M_PI * t / 30.0));
  const auto series = tsleak::TimeSeries::daily("demo", values);

  for (auto mode : {tsleak::Mode::leaky, tsleak::Mode::clean}) {
    const tsleak::SplitSpec spec{tsleak::SplitPlan::two_way(), mode, tsleak::Order::sequential,
                                 tsleak::WindowConfig(7, 2), std::nullopt};
    const auto result = tsleak::split(series, spec).front();
    const auto report = tsleak::audit(result);
    std::cout << tsleak::to_string(mode) << ": " << tsleak::describe_split(result) << "\n"
              << "  overlap " << report.overlap_count << " raw indices, "
              << report.contaminated_test_pairs << " contaminated test pairs\n";
    if (report.is_contaminated) {
      const auto gap = tsleak::minimal_clearing_gap(result);
      const auto buffered = tsleak::apply_buffer(result, gap);
      std::cout << "  buffer of " << gap << " -> overlap " << tsleak::audit(buffered).overlap_count
                << ", train " << buffered.train.size() << " pairs\n";
    }
  }

  const auto folds = tsleak::split(series, {tsleak::SplitPlan::two_way(), tsleak::Mode::clean,
                                            tsleak::Order::sequential, tsleak::WindowConfig(7, 1),
                                            std::nullopt});
  const auto& fold = folds.front();
  std::vector<double> targets;
  for (const auto& p : fold.test.pairs) targets.push_back(p.target);
  std::cout << "persistence RMSE " << tsleak::rmse(tsleak::baseline_persistence(fold.test), targets)
            << ", AR(7) RMSE "
            << tsleak::rmse(tsleak::baseline_linear_ar(fold.train, fold.test), targets) << "\n";
  return 0;
}
