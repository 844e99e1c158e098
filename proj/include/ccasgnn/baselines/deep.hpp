#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ccasgnn/baselines/features.hpp"
#include "ccasgnn/data/cascade.hpp"
#include "ccasgnn/model/params.hpp"

namespace ccasgnn::baselines {

struct DeepConfig {
  std::vector<int> hidden{32, 16};
  double learning_rate = 0.005;
  int epochs = 300;
  /// 0 trains on the full batch each step.
  int batch_size = 32;
  std::uint64_t seed = 1;

  std::vector<std::string> issues() const;
};

nlohmann::json to_json(const DeepConfig& c);

/// A ReLU MLP regressing the log2 growth target with squared error.
struct DeepFit {
  std::vector<int> hidden;
  model::NamedTensors params;
  long steps = 0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

inline const std::string kDeepStack = "deep";

/// Adam on mean squared error. Zero epochs returns the initialization.
DeepFit fit_deep(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const DeepConfig& config);

/// Mean of (prediction - y)^2 with both sides already in log2 space.
double squared_log_error(const DeepFit& fit, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Feature-Deep: standardized cascade features into the MLP.
struct FeatureDeep {
  FeatureScaler scaler;
  DeepFit fit;

  static FeatureDeep train(std::span<const data::CascadeGraph> cascades, const DeepConfig& config);
  double predict(const data::CascadeGraph& cascade) const;
};

}  // namespace ccasgnn::baselines
