#include "ccasgnn/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ccasgnn/errors.hpp"

namespace ccasgnn::data {

std::vector<std::string> GeneratorConfig::issues() const {
  std::vector<std::string> out;
  if (cascade_count <= 0) out.emplace_back("cascade_count must be positive");
  if (min_nodes < 2) out.emplace_back("min_nodes must be at least 2");
  if (max_nodes < min_nodes) out.emplace_back("max_nodes must be >= min_nodes");
  if (feature_dim <= 0) out.emplace_back("feature_dim must be positive");
  if (branching < 0.0) out.emplace_back("branching must be nonnegative");
  if (noise < 0.0) out.emplace_back("noise must be nonnegative");
  if (!(window > 0.0)) out.emplace_back("window must be positive");
  if (!(horizon > window)) out.emplace_back("horizon must exceed window");
  if (min_retweets < 0) out.emplace_back("min_retweets must be nonnegative");
  return out;
}

double growth_rule_log(const GrowthRule& rule, int observed_size, int depth, double mean_influence) {
  return rule.intercept + rule.size * std::log2(static_cast<double>(observed_size)) +
         rule.depth * std::log2(1.0 + static_cast<double>(depth)) + rule.influence * mean_influence;
}

std::int64_t growth_from_log(double y) {
  return std::max<std::int64_t>(0, std::llround(std::exp2(y)) - 1);
}

std::vector<CascadeGraph> generate_synthetic(const GeneratorConfig& config) {
  if (auto problems = config.issues(); !problems.empty()) throw ConfigError(std::move(problems));

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> size_dist(config.min_nodes, config.max_nodes);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<CascadeGraph> corpus;
  corpus.reserve(static_cast<std::size_t>(config.cascade_count));
  const int f = config.feature_dim;
  while (static_cast<int>(corpus.size()) < config.cascade_count) {
    const int n = size_dist(rng);
    const auto c = corpus.size();

    CascadeGraph g;
    g.cascade_id = "syn-" + std::to_string(c);
    g.features.resize(n, f);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < f; ++k) g.features(i, k) = gauss(rng);
    }
    // A second, noisier view of influence so features are not independent.
    if (f > 1) g.features.col(1) = 0.6 * g.features.col(kInfluenceFeature) + 0.8 * g.features.col(1);

    std::vector<double> times(static_cast<std::size_t>(n - 1));
    for (double& t : times) t = config.window * unit(rng);
    std::sort(times.begin(), times.end());

    std::vector<int> out_degree(static_cast<std::size_t>(n), 0);
    std::vector<double> weight(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      g.node_ids.push_back("c" + std::to_string(c) + "-u" + std::to_string(i));
      g.positions.push_back(i);
      g.activation_times.push_back(i == 0 ? 0.0 : times[static_cast<std::size_t>(i - 1)]);
      if (i == 0) continue;
      double total = 0.0;
      for (int j = 0; j < i; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        weight[ju] = (j == i - 1 ? 1.0 : 0.0) +
                     config.branching * (out_degree[ju] + 1) *
                         std::exp(0.7 * g.features(j, kInfluenceFeature));
        total += weight[ju];
      }
      double u = unit(rng) * total;
      int parent = i - 1;
      for (int j = 0; j < i; ++j) {
        u -= weight[static_cast<std::size_t>(j)];
        if (u < 0.0) {
          parent = j;
          break;
        }
      }
      ++out_degree[static_cast<std::size_t>(parent)];
      g.edges.push_back({parent, i});
    }

    const double noise = config.noise * (2.0 * unit(rng) - 1.0);
    const double mean_influence = g.features.col(kInfluenceFeature).mean();
    const double y = growth_rule_log(config.rule, n, cascade_depth(g), mean_influence) + noise;
    g.growth_label = growth_from_log(y);
    if ((n - 1) + g.growth_label < config.min_retweets) continue;
    corpus.push_back(std::move(g));
  }
  return corpus;
}

}  // namespace ccasgnn::data
