#include "ccasgnn/baselines/features.hpp"

#include <cmath>
#include <vector>

#include "ccasgnn/errors.hpp"

namespace ccasgnn::baselines {

Eigen::RowVectorXd FeatureVector::as_row() const {
  Eigen::RowVectorXd r(kSize);
  r << mean_in_degree, mean_out_degree, node_count, leaf_count, edge_count, mean_retweet_time;
  return r;
}

FeatureVector extract_features(const data::CascadeGraph& cascade) {
  cascade.validate();
  const int n = cascade.size();
  const auto edges = static_cast<double>(cascade.edges.size());
  std::vector<int> out_degree(static_cast<std::size_t>(n), 0);
  for (const data::Edge& e : cascade.edges) ++out_degree[static_cast<std::size_t>(e.src)];

  FeatureVector f;
  f.node_count = n;
  f.edge_count = edges;
  // Every edge adds one to some in-degree and one to some out-degree.
  f.mean_in_degree = edges / n;
  f.mean_out_degree = edges / n;
  for (int d : out_degree) f.leaf_count += d == 0 ? 1.0 : 0.0;

  const int root = cascade.root();
  double total = 0.0;
  int count = 0;
  for (int i = 0; i < n; ++i) {
    if (i == root) continue;
    total += cascade.activation_times[static_cast<std::size_t>(i)];
    ++count;
  }
  f.mean_retweet_time = count > 0 ? total / count : 0.0;
  return f;
}

Eigen::MatrixXd feature_matrix(std::span<const data::CascadeGraph> cascades) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(cascades.size()), FeatureVector::kSize);
  for (std::size_t i = 0; i < cascades.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = extract_features(cascades[i]).as_row();
  }
  return x;
}

FeatureScaler FeatureScaler::fit(const Eigen::MatrixXd& x) {
  if (x.rows() == 0) throw ContractViolation("FeatureScaler::fit: no rows");
  FeatureScaler s;
  s.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - s.mean;
  s.scale = (centered.array().square().colwise().sum() / static_cast<double>(x.rows())).sqrt().matrix();
  for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
    if (s.scale(j) < 1e-12) s.scale(j) = 1.0;
  }
  return s;
}

Eigen::MatrixXd FeatureScaler::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) {
    throw DimensionError("FeatureScaler::apply: expected " + std::to_string(mean.size()) +
                         " columns, got " + std::to_string(x.cols()));
  }
  return ((x.rowwise() - mean).array().rowwise() / scale.array()).matrix();
}

Eigen::VectorXd log_targets(std::span<const data::CascadeGraph> cascades) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(cascades.size()));
  for (std::size_t i = 0; i < cascades.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = data::log_growth(cascades[i].growth_label);
  }
  return y;
}

}  // namespace ccasgnn::baselines
