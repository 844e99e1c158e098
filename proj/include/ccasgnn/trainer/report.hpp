#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ccasgnn::trainer {

inline const std::string kTrainSplit = "train";
inline const std::string kValidationSplit = "validation";
inline const std::string kTestSplit = "test";

struct ReportEntry {
  std::string cascade_id;
  std::string split;
  double true_log = 0.0;
  double pred_log = 0.0;
  /// Per-head predictions; absent for single-output baselines.
  std::optional<double> pred_gat;
  std::optional<double> pred_att;

  friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

/// Per-cascade predictions in log2(growth + 1) space plus aggregates.
struct PredictionReport {
  std::string model = "CCasGNN";
  std::vector<ReportEntry> entries;
  /// MSLE per split tag, only for splits with at least one entry.
  std::map<std::string, double> msle;
  std::optional<double> w1;
  std::optional<double> w2;
  nlohmann::json config = nlohmann::json::object();
  double wall_clock_seconds = 0.0;

  void recompute_msle();
  std::optional<double> split_msle(const std::string& split) const;
  /// Appends another report's entries and recomputes the aggregates.
  void merge(const PredictionReport& other);

  friend bool operator==(const PredictionReport&, const PredictionReport&) = default;
};

/// Mean of (predicted - true)^2 where both are already log2(x + 1).
double msle(std::span<const double> predicted_log, std::span<const double> true_log);

nlohmann::json to_json(const PredictionReport& r);
PredictionReport report_from_json(const nlohmann::json& j);
void save_report(const std::filesystem::path& path, const PredictionReport& r);
PredictionReport load_report(const std::filesystem::path& path);

}  // namespace ccasgnn::trainer
