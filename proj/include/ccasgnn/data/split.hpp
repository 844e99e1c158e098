#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ccasgnn/data/cascade.hpp"

namespace ccasgnn::data {

struct DatasetSplit {
  std::vector<CascadeGraph> train;
  std::vector<CascadeGraph> validation;
  std::vector<CascadeGraph> test;
  std::uint64_t split_seed = 0;
};

/// Shuffles by seed, then train = round(0.7 N), validation = round(0.1 N),
/// test = remainder. Refuses corpora smaller than 10 cascades.
DatasetSplit split_corpus(std::span<const CascadeGraph> corpus, std::uint64_t seed);

struct SplitManifest {
  std::uint64_t seed = 0;
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

SplitManifest manifest_of(const DatasetSplit& split);
void write_split_manifest(const std::filesystem::path& path, const SplitManifest& manifest);
SplitManifest read_split_manifest(const std::filesystem::path& path);
/// Rebuilds a split from ids; unknown ids are a DataError.
DatasetSplit apply_split_manifest(std::span<const CascadeGraph> corpus, const SplitManifest& manifest);

}  // namespace ccasgnn::data
