#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "tsleak/detail/text.hpp"
#include "tsleak/error.hpp"
#include "tsleak/lstm.hpp"
#include "tsleak/scaler.hpp"
#include "tsleak/windowing.hpp"

namespace tsleak {

struct TrainConfig {
  std::size_t epochs = 100;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  bool early_stopping = false;
  std::size_t patience = 10;
  std::optional<std::uint64_t> seed;
  Scaling scaling = Scaling::zscore;
  std::size_t hidden_size = 64;

  void validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (hidden_size < 1) throw ConfigError("hidden size must be >= 1");
    if (early_stopping && (patience < 1 || patience >= epochs)) {
      throw ConfigError("patience must be in [1, epochs) when early stopping is on");
    }
  }

  bool operator==(const TrainConfig&) const = default;
};

// Adam with bias correction over a flat parameter vector.
class Adam {
 public:
  Adam(Eigen::Index size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon),
        m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  Eigen::VectorXd m_, v_;
  std::uint64_t t_ = 0;
};

// Mean squared errors in scaled units.
struct EpochLoss {
  double train_mse = 0.0;
  std::optional<double> val_mse;

  bool operator==(const EpochLoss&) const = default;
};

struct TrainOutcome {
  LstmModel model;
  Scaler scaler;
  std::vector<EpochLoss> loss_history;
  std::size_t optimal_epoch = 0;  // 1-based
  std::size_t last_epoch = 0;     // 1-based
  bool monitored_validation = false;

  bool operator==(const TrainOutcome&) const = default;
};

namespace detail {

struct ScaledSet {
  Eigen::MatrixXd inputs;      // W x N
  Eigen::RowVectorXd targets;  // 1 x N
};

inline ScaledSet scale_set(const SequenceSet& set, const Scaler& scaler) {
  const auto n = static_cast<Eigen::Index>(set.size());
  const auto w = static_cast<Eigen::Index>(set.config.window_size);
  ScaledSet out{Eigen::MatrixXd(w, n), Eigen::RowVectorXd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& pair = set.pairs[static_cast<std::size_t>(k)];
    if (static_cast<Eigen::Index>(pair.input.size()) != w) {
      throw DataError("sequence set mixes window sizes");
    }
    for (Eigen::Index t = 0; t < w; ++t) {
      out.inputs(t, k) = scaler.transform(pair.input[static_cast<std::size_t>(t)]);
    }
    out.targets(k) = scaler.transform(pair.target);
  }
  return out;
}

inline double mse(const LstmModel& model, const ScaledSet& set) {
  constexpr Eigen::Index kChunk = 1024;
  double total = 0.0;
  for (Eigen::Index start = 0; start < set.inputs.cols(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, set.inputs.cols() - start);
    const double loss = lstm_loss_and_gradient(model, set.inputs.middleCols(start, len),
                                               set.targets.segment(start, len), nullptr);
    total += loss * static_cast<double>(len);
  }
  return total / static_cast<double>(set.inputs.cols());
}

}  // namespace detail

// Mini-batch Adam on MSE with per-epoch shuffling. The scaler is fitted on
// the training pairs only. Early stopping watches the validation loss when a
// validation set is given, otherwise the epoch's mean training loss, and
// restores the weights of the best epoch.
inline TrainOutcome train(const SequenceSet& train_set, const std::optional<SequenceSet>& val_set,
                          const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.empty()) throw DataError("cannot train on an empty training set");
  if (val_set && val_set->empty()) throw DataError("validation (monitor) set is empty");

  std::mt19937_64 rng(cfg.seed ? *cfg.seed : std::random_device{}());
  TrainOutcome outcome;
  outcome.scaler = Scaler::fit(cfg.scaling, train_set);
  outcome.monitored_validation = val_set.has_value();
  const auto train_data = detail::scale_set(train_set, outcome.scaler);
  std::optional<detail::ScaledSet> val_data;
  if (val_set) val_data = detail::scale_set(*val_set, outcome.scaler);

  LstmModel model = LstmModel::initialized(cfg.hidden_size, rng);
  Adam adam(model.parameter_count(), cfg.learning_rate);
  LstmGradients grad(cfg.hidden_size);

  const auto n = static_cast<std::size_t>(train_data.inputs.cols());
  const auto w = train_data.inputs.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Eigen::MatrixXd batch_x;
  Eigen::RowVectorXd batch_y;

  double best = std::numeric_limits<double>::infinity();
  LstmModel best_model = model;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, n - start);
      batch_x.resize(w, static_cast<Eigen::Index>(len));
      batch_y.resize(static_cast<Eigen::Index>(len));
      for (std::size_t b = 0; b < len; ++b) {
        const auto src = static_cast<Eigen::Index>(order[start + b]);
        batch_x.col(static_cast<Eigen::Index>(b)) = train_data.inputs.col(src);
        batch_y(static_cast<Eigen::Index>(b)) = train_data.targets(src);
      }
      const double loss = lstm_loss_and_gradient(model, batch_x, batch_y, &grad);
      if (!std::isfinite(loss) || !grad.all_finite()) {
        throw NumericError("training diverged: non-finite loss in epoch " + std::to_string(epoch));
      }
      adam.step(model.parameters(), grad.parameters());
      epoch_loss += loss * static_cast<double>(len);
    }
    EpochLoss record{epoch_loss / static_cast<double>(n), std::nullopt};
    if (val_data) record.val_mse = detail::mse(model, *val_data);
    outcome.loss_history.push_back(record);
    outcome.last_epoch = epoch;

    const double monitor = record.val_mse ? *record.val_mse : record.train_mse;
    if (monitor < best) {
      best = monitor;
      outcome.optimal_epoch = epoch;
      since_best = 0;
      if (cfg.early_stopping) best_model = model;
    } else if (cfg.early_stopping && ++since_best >= cfg.patience) {
      break;
    }
  }
  if (cfg.early_stopping) {
    model = std::move(best_model);
  } else if (!val_data) {
    outcome.optimal_epoch = outcome.last_epoch;
  }
  outcome.model = std::move(model);
  return outcome;
}

// Predictions in original units, one per pair.
inline std::vector<double> predict(const LstmModel& model, const Scaler& scaler,
                                   const SequenceSet& set) {
  if (set.empty()) return {};
  const auto data = detail::scale_set(set, scaler);
  std::vector<double> out;
  out.reserve(set.size());
  constexpr Eigen::Index kChunk = 1024;
  for (Eigen::Index start = 0; start < data.inputs.cols(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, data.inputs.cols() - start);
    const auto y = lstm_forward_batch(model, data.inputs.middleCols(start, len));
    for (Eigen::Index k = 0; k < len; ++k) out.push_back(scaler.inverse_transform(y(k)));
  }
  return out;
}

inline std::vector<double> predict(const TrainOutcome& outcome, const SequenceSet& set) {
  return predict(outcome.model, outcome.scaler, set);
}

// Checkpoint: JSON object with hidden size, scaler and the flat parameter
// vector in the layout documented on LstmModel.
inline nlohmann::json checkpoint_json(const LstmModel& model, const Scaler& scaler) {
  const auto& p = model.parameters();
  return {{"format", "tsleak-lstm-v1"},
          {"hidden_size", model.hidden_size()},
          {"scaler", {{"kind", to_string(scaler.kind())}, {"shift", scaler.shift()}, {"scale", scaler.scale()}}},
          {"parameters", std::vector<double>(p.data(), p.data() + p.size())}};
}

inline void save_checkpoint(const std::filesystem::path& path, const LstmModel& model,
                            const Scaler& scaler) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << checkpoint_json(model, scaler).dump(1) << '\n';
}

inline std::pair<LstmModel, Scaler> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format") != "tsleak-lstm-v1") throw DataError("unknown checkpoint format");
    LstmModel model(j.at("hidden_size").get<std::size_t>());
    const auto params = j.at("parameters").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(params.size()) != model.parameter_count()) {
      throw DataError("checkpoint parameter count does not match hidden size");
    }
    model.parameters() = Eigen::Map<const Eigen::VectorXd>(params.data(), model.parameter_count());
    const auto& s = j.at("scaler");
    auto scaler = Scaler::from_parameters(parse_scaling(s.at("kind").get<std::string>()),
                                          s.at("shift").get<double>(), s.at("scale").get<double>());
    return {std::move(model), scaler};
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path.string() + "': " + e.what());
  }
}

inline void write_loss_history(const std::filesystem::path& path,
                               const std::vector<EpochLoss>& history) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "epoch,train_mse,val_mse\n";
  for (std::size_t e = 0; e < history.size(); ++e) {
    out << e + 1 << ',' << detail::format_double(history[e].train_mse) << ','
        << (history[e].val_mse ? detail::format_double(*history[e].val_mse) : "") << '\n';
  }
}

}  // namespace tsleak
