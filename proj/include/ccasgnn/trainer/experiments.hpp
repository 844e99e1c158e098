#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccasgnn/baselines/deep.hpp"
#include "ccasgnn/data/split.hpp"
#include "ccasgnn/model/config.hpp"
#include "ccasgnn/trainer/report.hpp"
#include "ccasgnn/trainer/train.hpp"

namespace ccasgnn::trainer {

struct AblationRow {
  std::string name;
  model::Variant variant = model::Variant::kFull;
  std::optional<double> train_msle;
  std::optional<double> validation_msle;
  std::optional<double> test_msle;
  std::optional<double> w1;
  std::optional<double> w2;
  int epochs = 0;
  double seconds = 0.0;
  /// Non-empty when this variant failed; the other rows still run.
  std::string error;
};

struct AblationTable {
  std::vector<AblationRow> rows;

  nlohmann::json to_json() const;
  static AblationTable from_json(const nlohmann::json& j);
  std::string to_text() const;
};

/// Display name of a variant in comparison tables: CCasGNN, CCasGNN-GAT, ...
std::string variant_label(model::Variant v);

/// Trains full, gat_only, gcn_only and no_pe with the same seeds and
/// settings. The `variant` field of `base` is ignored.
AblationTable run_ablation(const data::DatasetSplit& split, const model::ModelConfig& base,
                           const TrainConfig& train_config);

struct SensitivityRecord {
  /// "pe_dim" or "dropout_rate".
  std::string parameter;
  double value = 0.0;
  std::optional<double> test_msle;
  std::optional<double> validation_msle;
  int epochs = 0;
  double seconds_per_epoch = 0.0;
  std::string error;
};

struct SensitivityReport {
  std::vector<SensitivityRecord> records;

  nlohmann::json to_json() const;
  static SensitivityReport from_json(const nlohmann::json& j);
  std::string to_text() const;
};

struct SensitivityPlan {
  std::vector<int> pe_dims{8, 16, 32};
  std::vector<double> dropout_rates{0.0, 0.05, 0.10, 0.15, 0.20};
  std::uint64_t dropout_seed = 1;
};

/// One model per setting. d_p runs vary only pe_dim; dropout runs apply edge
/// dropout to all three splits at the base pe_dim. A dropout rate of 0 is
/// the unmodified base run, reused when the d_p sweep already trained it.
SensitivityReport run_sensitivity(const data::DatasetSplit& split, const model::ModelConfig& base,
                                  const TrainConfig& train_config, const SensitivityPlan& plan);

/// Feature-Linear and Feature-Deep predictions over all three splits.
struct BaselineReports {
  PredictionReport linear;
  PredictionReport deep;
};

BaselineReports run_baselines(const data::DatasetSplit& split, double ridge,
                              const baselines::DeepConfig& deep_config);

}  // namespace ccasgnn::trainer
