#pragma once

#include <span>

#include <Eigen/Dense>

#include "ccasgnn/data/cascade.hpp"

namespace ccasgnn::baselines {

/// Hand-crafted structural and temporal summary of one observed cascade.
struct FeatureVector {
  double mean_in_degree = 0.0;
  double mean_out_degree = 0.0;
  double node_count = 0.0;
  double leaf_count = 0.0;
  double edge_count = 0.0;
  double mean_retweet_time = 0.0;

  static constexpr int kSize = 6;
  Eigen::RowVectorXd as_row() const;
};

/// Degrees are taken over the stored directed edges; leaves have no
/// outgoing edge; the retweet time is averaged over non-root nodes.
FeatureVector extract_features(const data::CascadeGraph& cascade);

/// One row per cascade.
Eigen::MatrixXd feature_matrix(std::span<const data::CascadeGraph> cascades);

/// Column standardization with statistics from a training matrix.
struct FeatureScaler {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static FeatureScaler fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

/// log2(growth + 1) per cascade.
Eigen::VectorXd log_targets(std::span<const data::CascadeGraph> cascades);

}  // namespace ccasgnn::baselines
