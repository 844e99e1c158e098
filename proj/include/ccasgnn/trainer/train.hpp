#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccasgnn/data/split.hpp"
#include "ccasgnn/errors.hpp"
#include "ccasgnn/model/ccasgnn.hpp"
#include "ccasgnn/trainer/report.hpp"

namespace ccasgnn::trainer {

struct TrainConfig {
  double learning_rate = 0.005;
  int epochs = 100;
  int batch_size = 32;
  /// Epochs without a validation improvement before stopping.
  int patience = 20;
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Global gradient-norm cap; 0 disables clipping.
  double clip_norm = 5.0;
  /// Hard cap on optimizer steps; 0 means no cap.
  std::int64_t max_steps = 0;
  /// Standardize node features with training-split statistics.
  bool standardize = true;

  std::vector<std::string> issues() const;
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct EpochStats {
  int epoch = 0;
  std::int64_t steps = 0;
  /// Mean weighted head loss over the epoch's cascades, before each update.
  double train_loss = 0.0;
  double train_fusion_loss = 0.0;
  /// NaN when there is no validation split.
  double validation_msle = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  model::Model model;
  PredictionReport report;
  std::vector<EpochStats> history;
  int best_epoch = 0;
  std::int64_t steps = 0;
  bool stopped_early = false;
};

/// Raised when the loss or the parameters stop being finite.
class TrainingDiverged : public NumericalError {
 public:
  TrainingDiverged(const std::string& what, model::Model last_good, int epoch, std::int64_t step)
      : NumericalError(what), last_good_(std::move(last_good)), epoch_(epoch), step_(step) {}
  const model::Model& last_good() const { return last_good_; }
  int epoch() const { return epoch_; }
  std::int64_t step() const { return step_; }

 private:
  model::Model last_good_;
  int epoch_;
  std::int64_t step_;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Mini-batch Adam on the CCasGNN objective. Returns the parameters with the
/// best validation MSLE (the last ones when the validation split is empty)
/// and a report over all three splits.
TrainResult train(const data::DatasetSplit& split, const model::ModelConfig& config,
                  const TrainConfig& train_config, const EpochCallback& on_epoch = {});

/// Predictions for every cascade, tagged with `split`. Parameters are not
/// modified.
PredictionReport evaluate(const model::Model& model, std::span<const data::CascadeGraph> cascades,
                          const std::string& split);
PredictionReport evaluate(const model::Model& model, const data::DatasetSplit& split);

}  // namespace ccasgnn::trainer
