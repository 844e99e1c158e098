#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ccasgnn/data/cascade.hpp"

namespace ccasgnn::data {

/// Removes each edge not touching the root with probability `rate`.
/// Requires 0 <= rate < 1.
CascadeGraph edge_dropout(const CascadeGraph& cascade, double rate, std::uint64_t seed);

/// Applies edge_dropout to every cascade, seeding each from (seed, index).
std::vector<CascadeGraph> edge_dropout(std::span<const CascadeGraph> corpus, double rate,
                                       std::uint64_t seed);

/// Per-feature standardization fitted on node rows of a training set.
struct FeatureNormalizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static FeatureNormalizer fit(std::span<const CascadeGraph> cascades);
  static FeatureNormalizer identity(int feature_dim);

  CascadeGraph apply(const CascadeGraph& g) const;
  std::vector<CascadeGraph> apply(std::span<const CascadeGraph> cascades) const;
};

}  // namespace ccasgnn::data
