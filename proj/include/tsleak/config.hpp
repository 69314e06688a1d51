#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsleak/error.hpp"
#include "tsleak/scaler.hpp"
#include "tsleak/splitting.hpp"
#include "tsleak/trainer.hpp"

namespace tsleak {

enum class ModelKind { lstm, persistence, linear_ar };

inline std::string_view to_string(ModelKind m) {
  switch (m) {
    case ModelKind::lstm: return "lstm";
    case ModelKind::persistence: return "persistence";
    case ModelKind::linear_ar: return "linear_ar";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "lstm") return ModelKind::lstm;
  if (s == "persistence") return ModelKind::persistence;
  if (s == "linear_ar") return ModelKind::linear_ar;
  throw ConfigError("unknown model '" + std::string(s) + "'");
}

// One training setup. A config holds one or more; each becomes its own set of
// report cells, labelled by `name`.
struct Setup {
  std::string name;
  Order order = Order::sequential;
  ModelKind model = ModelKind::lstm;
  TrainConfig train;

  bool operator==(const Setup&) const = default;
};

struct DatasetSpec {
  std::filesystem::path path;
  std::string date_column = "date";
  std::string value_column = "meantemp";

  bool operator==(const DatasetSpec&) const = default;
};

struct ExperimentConfig {
  std::string name;
  DatasetSpec dataset;
  std::vector<std::size_t> windows{10};
  std::vector<std::size_t> lags{1};
  // When non-empty, replaces the windows x lags product.
  std::vector<std::pair<std::size_t, std::size_t>> window_lag_pairs;
  std::vector<SplitPlan> plans;
  std::vector<Mode> modes{Mode::leaky};
  std::vector<Setup> setups;
  std::size_t repetitions = 10;
  std::optional<std::uint64_t> base_seed;
  std::size_t workers = 1;
  bool keep_going = false;

  std::vector<std::pair<std::size_t, std::size_t>> grid() const {
    if (!window_lag_pairs.empty()) return window_lag_pairs;
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (auto w : windows) {
      for (auto l : lags) out.emplace_back(w, l);
    }
    return out;
  }

  void validate() const {
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (grid().empty()) throw ConfigError("window/lag grid is empty");
    if (plans.empty()) throw ConfigError("no validation plans");
    if (modes.empty()) throw ConfigError("no modes");
    if (setups.empty()) throw ConfigError("no setups");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    for (const auto& [w, l] : grid()) WindowConfig(w, l);
    for (const auto& p : plans) p.validate();
    for (const auto& s : setups) {
      s.train.validate();
      for (Mode m : modes) {
        if (m == Mode::clean && s.order == Order::random) {
          throw ConfigError("setup '" + s.name + "': clean mode requires sequential order");
        }
      }
    }
  }

  bool operator==(const ExperimentConfig&) const = default;
};

// ---- JSON mapping --------------------------------------------------------

inline void to_json(nlohmann::json& j, const SplitPlan& p) {
  j = {{"kind", to_string(p.kind)}};
  if (p.kind == SplitKind::k_fold) {
    j["k"] = p.k;
  } else {
    j["fractions"] = p.fractions;
  }
}

inline void from_json(const nlohmann::json& j, SplitPlan& p) {
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    if (auto labelled = plan_from_label(text)) {
      p = *labelled;
      return;
    }
    const auto kind = parse_split_kind(text);
    p = kind == SplitKind::two_way     ? SplitPlan::two_way()
        : kind == SplitKind::three_way ? SplitPlan::three_way()
                                       : SplitPlan::k_fold();
    return;
  }
  const auto kind = parse_split_kind(j.at("kind").get<std::string>());
  if (kind == SplitKind::k_fold) {
    p = SplitPlan::k_fold(j.value("k", std::size_t{10}));
  } else if (j.contains("fractions")) {
    p = SplitPlan{kind, j.at("fractions").get<std::vector<double>>(), 0};
    p.validate();
  } else {
    p = kind == SplitKind::two_way ? SplitPlan::two_way() : SplitPlan::three_way();
  }
}

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"epochs", c.epochs},
       {"learning_rate", c.learning_rate},
       {"batch_size", c.batch_size},
       {"early_stopping", c.early_stopping},
       {"patience", c.patience},
       {"scaling", to_string(c.scaling)},
       {"hidden_size", c.hidden_size}};
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
  c = TrainConfig{};
  c.epochs = j.value("epochs", c.epochs);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.early_stopping = j.value("early_stopping", c.early_stopping);
  c.patience = j.value("patience", c.patience);
  c.scaling = parse_scaling(j.value("scaling", std::string(to_string(c.scaling))));
  c.hidden_size = j.value("hidden_size", c.hidden_size);
}

inline void to_json(nlohmann::json& j, const Setup& s) {
  j = {{"name", s.name}, {"order", to_string(s.order)}, {"model", to_string(s.model)},
       {"train", s.train}};
}

inline nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json modes = nlohmann::json::array();
  for (Mode m : c.modes) modes.push_back(to_string(m));
  nlohmann::json j{{"name", c.name},
                   {"dataset",
                    {{"path", c.dataset.path.string()},
                     {"date_column", c.dataset.date_column},
                     {"value_column", c.dataset.value_column}}},
                   {"windows", c.windows},
                   {"lags", c.lags},
                   {"plans", c.plans},
                   {"modes", modes},
                   {"setups", c.setups},
                   {"repetitions", c.repetitions},
                   {"workers", c.workers},
                   {"keep_going", c.keep_going}};
  if (!c.window_lag_pairs.empty()) j["window_lag_pairs"] = c.window_lag_pairs;
  j["base_seed"] = c.base_seed ? nlohmann::json(*c.base_seed) : nlohmann::json(nullptr);
  return j;
}

// Parses a config object. Relative dataset paths resolve against `base_dir`.
// Setups may be given as a "setups" array; otherwise the top-level "order",
// "model" and "train" keys form a single setup named after the experiment.
inline ExperimentConfig parse_config(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir = {}) {
  try {
    ExperimentConfig c;
    c.name = j.at("name").get<std::string>();
    const auto& ds = j.at("dataset");
    c.dataset.path = ds.at("path").get<std::string>();
    if (c.dataset.path.is_relative() && !base_dir.empty()) c.dataset.path = base_dir / c.dataset.path;
    c.dataset.date_column = ds.value("date_column", c.dataset.date_column);
    c.dataset.value_column = ds.value("value_column", c.dataset.value_column);
    c.windows = j.value("windows", c.windows);
    c.lags = j.value("lags", c.lags);
    if (j.contains("window_lag_pairs")) {
      c.window_lag_pairs = j.at("window_lag_pairs").get<std::vector<std::pair<std::size_t, std::size_t>>>();
    }
    c.plans = j.at("plans").get<std::vector<SplitPlan>>();
    if (j.contains("modes")) {
      c.modes.clear();
      for (const auto& m : j.at("modes")) c.modes.push_back(parse_mode(m.get<std::string>()));
    }
    auto read_setup = [](const nlohmann::json& s, std::string fallback_name) {
      Setup out;
      out.name = s.value("name", fallback_name);
      out.order = parse_order(s.value("order", std::string("sequential")));
      out.model = parse_model_kind(s.value("model", std::string("lstm")));
      if (s.contains("train")) out.train = s.at("train").get<TrainConfig>();
      return out;
    };
    if (j.contains("setups")) {
      for (const auto& s : j.at("setups")) c.setups.push_back(read_setup(s, c.name));
    } else {
      c.setups.push_back(read_setup(j, c.name));
    }
    c.repetitions = j.value("repetitions", c.repetitions);
    if (j.contains("base_seed") && !j.at("base_seed").is_null()) {
      c.base_seed = j.at("base_seed").get<std::uint64_t>();
    }
    c.workers = j.value("workers", c.workers);
    c.keep_going = j.value("keep_going", c.keep_going);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  }
  return parse_config(j, path.parent_path());
}

}  // namespace tsleak
