#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ccasgnn::data {

/// Directed retweet edge, source -> retweeter, as node indices.
struct Edge {
  int src = 0;
  int dst = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One observed cascade: the prefix of a diffusion visible inside the
/// observation window, plus the number of retweets that arrive afterwards.
struct CascadeGraph {
  std::string cascade_id;
  std::vector<std::string> node_ids;
  std::vector<Edge> edges;
  /// Activation rank of each node, 0 for the root.
  std::vector<int> positions;
  Eigen::MatrixXd features;  // n x F
  std::vector<double> activation_times;
  std::int64_t growth_label = 0;

  int size() const { return static_cast<int>(node_ids.size()); }
  int feature_dim() const { return static_cast<int>(features.cols()); }
  /// Index of the node with position 0.
  int root() const;

  /// Throws ValidationError when an invariant does not hold.
  void validate() const;

  friend bool operator==(const CascadeGraph& a, const CascadeGraph& b);
};

/// One line of the cascade file: every event up to the label horizon.
struct Event {
  std::string user;
  double time = 0.0;
  std::optional<std::string> parent;
};

struct CascadeRecord {
  std::string id;
  std::vector<Event> events;
};

/// Longest root-to-node hop count along stored edges.
int cascade_depth(const CascadeGraph& g);

/// log2(growth + 1), the regression target.
double log_growth(std::int64_t growth);

}  // namespace ccasgnn::data
