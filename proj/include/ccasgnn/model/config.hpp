#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ccasgnn::model {

/// Ablation variants. gat_only and gcn_only drop a whole branch; no_pe drops
/// the positional encodings from every layer input.
enum class Variant { kFull, kGatOnly, kGcnOnly, kNoPe };

enum class Activation { kRelu, kElu, kIdentity };

std::string_view to_string(Variant v);
std::string_view to_string(Activation a);
/// Accepts both the long names and the CLI spellings full|gat|gcn|nope.
Variant parse_variant(std::string_view s);
Activation parse_activation(std::string_view s);

struct ModelConfig {
  int feature_dim = 8;
  int pe_dim = 16;
  int gnn_layers = 2;
  std::vector<int> gat_hidden{32, 32};
  std::vector<int> gcn_hidden{32, 32};
  int heads = 4;
  /// d_q = d_k = d_v.
  int head_dim = 16;
  std::vector<int> mlp_hidden{32, 16};
  double leaky_slope = 0.2;
  Activation gat_activation = Activation::kElu;
  Activation gcn_activation = Activation::kRelu;
  Variant variant = Variant::kFull;

  bool uses_gat() const { return variant != Variant::kGcnOnly; }
  bool uses_gcn() const { return variant != Variant::kGatOnly; }
  bool uses_pe() const { return variant != Variant::kNoPe; }

  std::vector<std::string> issues() const;
  /// Throws ConfigError listing every issue.
  void validate() const;
};

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace ccasgnn::model
