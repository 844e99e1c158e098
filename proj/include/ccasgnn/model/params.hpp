#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccasgnn/model/config.hpp"

namespace ccasgnn::model {

/// Matrices keyed by stable parameter names such as "gat.0.W" or
/// "fusion.w1". Used for both weights and their gradients.
struct NamedTensors {
  std::map<std::string, Eigen::MatrixXd> tensors;

  const Eigen::MatrixXd& at(const std::string& name) const;
  Eigen::MatrixXd& at(const std::string& name);
  bool contains(const std::string& name) const { return tensors.contains(name); }
  std::size_t parameter_count() const;
  bool all_finite() const;
  double squared_norm() const;

  /// Same names and shapes, all zeros.
  NamedTensors zeros_like() const;
  NamedTensors& operator+=(const NamedTensors& other);
  NamedTensors& operator*=(double s);

  friend bool operator==(const NamedTensors& a, const NamedTensors& b);
};

using ModelParams = NamedTensors;
using Gradients = NamedTensors;

/// Order-stable reduction: contributions are summed as a balanced binary
/// tree over their index order.
NamedTensors pairwise_sum(std::span<const NamedTensors> parts);

/// Glorot-uniform weights, zero biases, fusion weights 0.5 (0 for the branch
/// a variant leaves out). Deterministic per seed.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

/// Uniform in +-sqrt(6 / (fan_in + fan_out)), filled column by column.
Eigen::MatrixXd glorot_uniform(Eigen::Index rows, Eigen::Index cols, double fan_in, double fan_out,
                               std::mt19937_64& rng);

/// Adds `stack`.k.W / `stack`.k.b for in -> hidden... -> 1.
void add_mlp(NamedTensors& p, const std::string& stack, int in, const std::vector<int>& hidden,
             std::mt19937_64& rng);

/// Fusion weights are only trained for branches the variant keeps.
bool is_trainable(const ModelConfig& config, const std::string& name);

// Parameter names.
std::string gat_weight(int layer);
std::string gat_attention(int layer);
std::string gcn_weight(int layer);
std::string gcn_bias(int layer);
std::string head_query(int head);
std::string head_key(int head);
std::string head_value(int head);
std::string mlp_weight(const std::string& stack, int layer);
std::string mlp_bias(const std::string& stack, int layer);
inline const std::string kFusionW1 = "fusion.w1";
inline const std::string kFusionW2 = "fusion.w2";
inline const std::string kMlpGat = "mlp_gat";
inline const std::string kMlpAtt = "mlp_att";

}  // namespace ccasgnn::model
