#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccasgnn/baselines/deep.hpp"
#include "ccasgnn/data/synthetic.hpp"
#include "ccasgnn/model/config.hpp"
#include "ccasgnn/trainer/experiments.hpp"
#include "ccasgnn/trainer/train.hpp"

namespace ccasgnn::cli {

/// Every setting a command can read. Filled from defaults, then a key=value
/// config file, then command-line overrides.
struct RunConfig {
  /// Master seed; drives generation, splitting, initialization and dropout.
  std::optional<std::uint64_t> seed;

  std::optional<std::filesystem::path> corpus;
  /// Feature sidecar; defaults to <corpus>.features.jsonl when that exists.
  std::optional<std::filesystem::path> features;
  std::optional<std::filesystem::path> checkpoint;
  /// Split manifest to reuse instead of drawing a new split.
  std::optional<std::filesystem::path> split;

  double window = 1.0;
  int min_retweets = 10;
  /// Used only when the corpus has no feature sidecar.
  int feature_dim = 0;
  /// Edge dropout applied to every loaded cascade.
  double dropout_rate = 0.0;

  data::GeneratorConfig gen;
  model::ModelConfig model;
  trainer::TrainConfig train;
  double ridge = 1e-6;
  baselines::DeepConfig deep;
  trainer::SensitivityPlan sensitivity;

  /// Test hook: op whose backward rule gradcheck corrupts.
  std::string inject_fault;

  /// Semantic checks across all sections, every violation listed.
  std::vector<std::string> issues() const;
  /// Copies the master seed into every per-component seed.
  void propagate_seed();
};

using Setting = std::pair<std::string, std::string>;

/// Parses "key = value" lines; '#' starts a comment. Syntax errors are
/// reported with their line numbers in `issues`.
std::vector<Setting> parse_config_text(const std::string& text, const std::string& source,
                                       std::vector<std::string>& issues);
std::vector<Setting> read_config_file(const std::filesystem::path& path, std::vector<std::string>& issues);

/// Applies one setting; a bad key or value adds to `issues`.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   std::vector<std::string>& issues);

/// Defaults, then the file (if any), then overrides in order. Throws
/// ConfigError listing every problem found.
RunConfig resolve_config(const std::optional<std::filesystem::path>& file,
                         const std::vector<Setting>& overrides);

/// The fully resolved settings, one entry per known key, in a form
/// apply_setting reads back to the same values.
std::map<std::string, std::string> snapshot(const RunConfig& config);

/// All recognized keys.
std::vector<std::string> known_keys();

}  // namespace ccasgnn::cli
