#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccasgnn/data/cascade.hpp"

namespace ccasgnn::data {

/// Coefficients of the closed-form growth rule
///   y = intercept + size * log2(n) + depth * log2(1 + depth(g)) + influence * mean_influence
/// with growth = max(0, round(2^(y + noise)) - 1).
struct GrowthRule {
  double intercept = 2.0;
  double size = 0.8;
  double depth = -0.5;
  double influence = 1.5;
};

struct GeneratorConfig {
  int cascade_count = 100;
  int min_nodes = 4;
  int max_nodes = 30;
  int feature_dim = 8;
  /// Weight of preferential attachment relative to extending the newest
  /// node; 0 grows pure chains.
  double branching = 1.0;
  GrowthRule rule;
  /// Uniform noise amplitude added to y before rounding.
  double noise = 0.25;
  double window = 1.0;
  double horizon = 24.0;
  /// Retweet filter the generated cascades must survive.
  int min_retweets = 10;
  std::uint64_t seed = 7;

  /// Every violated constraint, empty when valid.
  std::vector<std::string> issues() const;
};

/// Log-domain value of the growth rule before noise.
double growth_rule_log(const GrowthRule& rule, int observed_size, int depth, double mean_influence);
/// Integer label from a log-domain value.
std::int64_t growth_from_log(double y);

/// Column of the feature matrix carrying the influence signal.
inline constexpr int kInfluenceFeature = 0;

/// Random preferential-attachment trees with Gaussian node features; the
/// influence feature raises a node's chance of being retweeted, and labels
/// follow the growth rule. Deterministic per seed.
std::vector<CascadeGraph> generate_synthetic(const GeneratorConfig& config);

}  // namespace ccasgnn::data
