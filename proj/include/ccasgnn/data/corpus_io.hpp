#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccasgnn/data/cascade.hpp"

namespace ccasgnn::data {

using FeatureTable = std::map<std::string, std::vector<double>>;

struct CorpusOptions {
  /// Observation window length, in the unit of the file's event times.
  double window = 1.0;
  /// Cascades with fewer retweets than this at the horizon are dropped.
  std::size_t min_retweets = 10;
  /// Optional sidecar of per-user features.
  std::optional<std::filesystem::path> features;
  /// Feature width when no sidecar is given (nodes get zero vectors).
  int feature_dim = 0;
};

std::vector<CascadeRecord> read_records(const std::filesystem::path& path);
void write_records(const std::filesystem::path& path, std::span<const CascadeRecord> records);

FeatureTable read_feature_table(const std::filesystem::path& path);
void write_feature_table(const std::filesystem::path& path, const FeatureTable& table);

/// Truncates a record to its observation window. Returns nothing when the
/// cascade fails the retweet filter or only the root is observed.
std::optional<CascadeGraph> observe(const CascadeRecord& record, double window,
                                    std::size_t min_retweets, const FeatureTable& features,
                                    int feature_dim);

/// Reads, truncates and filters a cascade file.
std::vector<CascadeGraph> load_corpus(const std::filesystem::path& path, const CorpusOptions& options);

/// Inverse of `observe` for tree-shaped cascades: observed events keep their
/// times, and `growth_label` placeholder events are appended after `window`
/// (up to `horizon`), attached to the root.
CascadeRecord to_record(const CascadeGraph& g, double window, double horizon);

/// Writes `<path>` and, when `features_path` is set, the feature sidecar.
void save_corpus(const std::filesystem::path& path, std::span<const CascadeGraph> corpus,
                 double window, double horizon,
                 const std::optional<std::filesystem::path>& features_path);

/// `corpus.jsonl` -> `corpus.features.jsonl`.
std::filesystem::path default_features_path(const std::filesystem::path& corpus_path);

}  // namespace ccasgnn::data
