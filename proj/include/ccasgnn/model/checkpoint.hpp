#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "ccasgnn/model/ccasgnn.hpp"

namespace ccasgnn::model {

inline constexpr int kCheckpointFormat = 1;

/// {"format": 1, "config": {...}, "params": {name: {rows, cols, data}},
///  "normalizer": {"mean": [...], "scale": [...]}}; data is row-major.
nlohmann::json checkpoint_json(const Model& model);
Model model_from_checkpoint(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const Model& model);
Model load_checkpoint(const std::filesystem::path& path);

nlohmann::json matrix_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

}  // namespace ccasgnn::model
