#include "ccasgnn/model/config.hpp"

#include "ccasgnn/errors.hpp"

namespace ccasgnn::model {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kGatOnly: return "gat_only";
    case Variant::kGcnOnly: return "gcn_only";
    case Variant::kNoPe: return "no_pe";
  }
  return "full";
}

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kElu: return "elu";
    case Activation::kIdentity: return "identity";
  }
  return "relu";
}

Variant parse_variant(std::string_view s) {
  if (s == "full") return Variant::kFull;
  if (s == "gat" || s == "gat_only") return Variant::kGatOnly;
  if (s == "gcn" || s == "gcn_only") return Variant::kGcnOnly;
  if (s == "nope" || s == "no_pe") return Variant::kNoPe;
  throw ConfigError({"variant: unknown value '" + std::string(s) + "' (full|gat|gcn|nope)"});
}

Activation parse_activation(std::string_view s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "elu") return Activation::kElu;
  if (s == "identity") return Activation::kIdentity;
  throw ConfigError({"activation: unknown value '" + std::string(s) + "' (relu|elu|identity)"});
}

std::vector<std::string> ModelConfig::issues() const {
  std::vector<std::string> out;
  auto positive_all = [&](const std::vector<int>& v, const char* name) {
    for (int w : v) {
      if (w <= 0) {
        out.push_back(std::string(name) + ": widths must be positive");
        return;
      }
    }
  };
  if (feature_dim <= 0) out.emplace_back("feature_dim must be positive");
  if (pe_dim <= 0) out.emplace_back("pe_dim must be positive");
  if (pe_dim % 2 != 0) out.emplace_back("pe_dim must be even (sin/cos pairs)");
  if (gnn_layers <= 0) out.emplace_back("gnn_layers must be positive");
  if (static_cast<int>(gat_hidden.size()) != gnn_layers) {
    out.emplace_back("gat_hidden must list one width per GNN layer");
  }
  if (static_cast<int>(gcn_hidden.size()) != gnn_layers) {
    out.emplace_back("gcn_hidden must list one width per GNN layer");
  }
  positive_all(gat_hidden, "gat_hidden");
  positive_all(gcn_hidden, "gcn_hidden");
  positive_all(mlp_hidden, "mlp_hidden");
  if (heads <= 0) out.emplace_back("heads must be positive");
  if (head_dim <= 0) out.emplace_back("head_dim must be positive");
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) out.emplace_back("leaky_slope must lie in (0,1)");
  return out;
}

void ModelConfig::validate() const {
  if (auto problems = issues(); !problems.empty()) throw ConfigError(std::move(problems));
}

nlohmann::json to_json(const ModelConfig& c) {
  return {
      {"feature_dim", c.feature_dim},
      {"pe_dim", c.pe_dim},
      {"gnn_layers", c.gnn_layers},
      {"gat_hidden", c.gat_hidden},
      {"gcn_hidden", c.gcn_hidden},
      {"heads", c.heads},
      {"head_dim", c.head_dim},
      {"mlp_hidden", c.mlp_hidden},
      {"leaky_slope", c.leaky_slope},
      {"gat_activation", to_string(c.gat_activation)},
      {"gcn_activation", to_string(c.gcn_activation)},
      {"variant", to_string(c.variant)},
  };
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.feature_dim = j.at("feature_dim").get<int>();
  c.pe_dim = j.at("pe_dim").get<int>();
  c.gnn_layers = j.at("gnn_layers").get<int>();
  c.gat_hidden = j.at("gat_hidden").get<std::vector<int>>();
  c.gcn_hidden = j.at("gcn_hidden").get<std::vector<int>>();
  c.heads = j.at("heads").get<int>();
  c.head_dim = j.at("head_dim").get<int>();
  c.mlp_hidden = j.at("mlp_hidden").get<std::vector<int>>();
  c.leaky_slope = j.at("leaky_slope").get<double>();
  c.gat_activation = parse_activation(j.at("gat_activation").get<std::string>());
  c.gcn_activation = parse_activation(j.at("gcn_activation").get<std::string>());
  c.variant = parse_variant(j.at("variant").get<std::string>());
  return c;
}

}  // namespace ccasgnn::model
