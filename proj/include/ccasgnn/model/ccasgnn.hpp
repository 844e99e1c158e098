#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccasgnn/data/cascade.hpp"
#include "ccasgnn/data/transforms.hpp"
#include "ccasgnn/model/config.hpp"
#include "ccasgnn/model/layers.hpp"
#include "ccasgnn/model/params.hpp"

namespace ccasgnn::model {

/// Everything the network reads from a cascade, precomputed once.
struct GraphInputs {
  Eigen::MatrixXd features;
  Eigen::MatrixXd pe;
  numcore::BoolMask neighborhood;
  Eigen::MatrixXd laplacian;
};

GraphInputs prepare_inputs(const data::CascadeGraph& cascade, const ModelConfig& config);

/// Parameters recorded on one tape.
template <typename Scalar>
struct BasicBoundParams {
  numcore::BasicTape<Scalar>* tape = nullptr;
  std::map<std::string, numcore::BasicNodeRef<Scalar>> refs;

  const numcore::BasicNodeRef<Scalar>& at(const std::string& name) const {
    auto it = refs.find(name);
    if (it == refs.end()) throw std::out_of_range("parameter " + name + " not bound");
    return it->second;
  }
};

/// Records every parameter as a leaf. With `trainable` false all leaves are
/// constants (inference); otherwise only `is_trainable` names get gradients.
template <typename Scalar>
BasicBoundParams<Scalar> bind_params(numcore::BasicTape<Scalar>& tape, const ModelParams& params,
                                     const ModelConfig& config, bool trainable = true) {
  BasicBoundParams<Scalar> bound;
  bound.tape = &tape;
  for (const auto& [name, value] : params.tensors) {
    numcore::MatrixX<Scalar> v = value.template cast<Scalar>();
    const bool grad = trainable && is_trainable(config, name);
    bound.refs.emplace(name, grad ? tape.parameter(std::move(v)) : tape.constant(std::move(v)));
  }
  return bound;
}

template <typename Scalar>
struct BasicForwardOutput {
  numcore::BasicNodeRef<Scalar> pred_gat;
  numcore::BasicNodeRef<Scalar> pred_att;
  numcore::BasicNodeRef<Scalar> pred_combined;
  numcore::BasicNodeRef<Scalar> w1;
  numcore::BasicNodeRef<Scalar> w2;
  std::vector<numcore::BasicNodeRef<Scalar>> gat_attention;
  std::vector<numcore::BasicNodeRef<Scalar>> head_attention;

  Scalar gat() const { return pred_gat.item(); }
  Scalar att() const { return pred_att.item(); }
  Scalar combined() const { return pred_combined.item(); }
};

namespace detail {

template <typename Fn>
auto with_branch_context(const char* branch, Fn&& fn) {
  try {
    return fn();
  } catch (const DimensionError& e) {
    throw DimensionError(std::string(branch) + " branch: " + e.what());
  }
}

template <typename Scalar>
numcore::BasicNodeRef<Scalar> head_mlp(const BasicBoundParams<Scalar>& p, const std::string& stack,
                                       const numcore::BasicNodeRef<Scalar>& pooled,
                                       const ModelConfig& config) {
  std::vector<numcore::BasicNodeRef<Scalar>> weights;
  std::vector<numcore::BasicNodeRef<Scalar>> biases;
  const int layers = static_cast<int>(config.mlp_hidden.size()) + 1;
  for (int k = 0; k < layers; ++k) {
    weights.push_back(p.at(mlp_weight(stack, k)));
    biases.push_back(p.at(mlp_bias(stack, k)));
  }
  return mlp<Scalar>(pooled, weights, biases);
}

}  // namespace detail

/// Both branches, pooling, heads and fusion. Predictions are log2(growth+1).
/// A branch the variant drops contributes a constant 0 with weight 0.
template <typename Scalar>
BasicForwardOutput<Scalar> forward(const BasicBoundParams<Scalar>& params, const GraphInputs& inputs,
                                   const ModelConfig& config) {
  using Ref = numcore::BasicNodeRef<Scalar>;
  auto& tape = *params.tape;
  if (inputs.features.cols() != config.feature_dim) {
    throw DimensionError("forward: cascade has " + std::to_string(inputs.features.cols()) +
                         " features, model expects " + std::to_string(config.feature_dim));
  }
  BasicForwardOutput<Scalar> out;
  const Ref features = tape.constant(inputs.features.template cast<Scalar>());
  std::optional<Ref> pe;
  if (config.uses_pe()) pe = tape.constant(inputs.pe.template cast<Scalar>());
  const auto slope = static_cast<Scalar>(config.leaky_slope);

  if (config.uses_gat()) {
    out.pred_gat = detail::with_branch_context("GAT", [&] {
      Ref h = features;
      for (int l = 0; l < config.gnn_layers; ++l) {
        auto layer = gat_layer<Scalar>(h, pe, inputs.neighborhood, params.at(gat_weight(l)),
                                       params.at(gat_attention(l)), slope, config.gat_activation);
        h = layer.hidden;
        out.gat_attention.push_back(layer.attention);
      }
      return detail::head_mlp(params, kMlpGat, numcore::mean_rows(h), config);
    });
  } else {
    out.pred_gat = tape.scalar_constant(Scalar(0));
  }

  if (config.uses_gcn()) {
    out.pred_att = detail::with_branch_context("GCN", [&] {
      const Ref lap = tape.constant(inputs.laplacian.template cast<Scalar>());
      Ref h = features;
      for (int l = 0; l < config.gnn_layers; ++l) {
        h = gcn_layer<Scalar>(h, pe, lap, params.at(gcn_weight(l)), params.at(gcn_bias(l)),
                              config.gcn_activation);
      }
      std::vector<AttentionHead<Scalar>> heads;
      for (int k = 0; k < config.heads; ++k) {
        heads.push_back({params.at(head_query(k)), params.at(head_key(k)), params.at(head_value(k))});
      }
      auto att = multi_head_attention<Scalar>(h, heads);
      out.head_attention = att.attention;
      return detail::head_mlp(params, kMlpAtt, numcore::mean_rows(att.hidden), config);
    });
  } else {
    out.pred_att = tape.scalar_constant(Scalar(0));
  }

  out.w1 = params.at(kFusionW1);
  out.w2 = params.at(kFusionW2);
  out.pred_combined = numcore::add(numcore::hadamard(out.w1, out.pred_gat),
                                   numcore::hadamard(out.w2, out.pred_att));
  return out;
}

namespace detail {

template <typename Scalar>
void check_batch(std::span<const BasicForwardOutput<Scalar>> outputs, std::span<const std::int64_t> growth) {
  if (outputs.empty()) throw ContractViolation("loss: empty batch");
  if (outputs.size() != growth.size()) throw ContractViolation("loss: outputs and labels differ in length");
  for (std::int64_t g : growth) {
    if (g < 0) throw ValidationError("loss: negative growth label");
  }
}

template <typename Scalar>
numcore::BasicNodeRef<Scalar> log_target(numcore::BasicTape<Scalar>& tape, std::int64_t growth) {
  return tape.scalar_constant(std::log2(static_cast<Scalar>(growth) + Scalar(1)));
}

template <typename Scalar>
numcore::BasicNodeRef<Scalar> squared(const numcore::BasicNodeRef<Scalar>& x) {
  return numcore::hadamard(x, x);
}

}  // namespace detail

/// mean_i [ w1 (gat_i - y_i)^2 + w2 (att_i - y_i)^2 ], y = log2(growth + 1).
/// All outputs must live on one tape.
template <typename Scalar>
numcore::BasicNodeRef<Scalar> loss(std::span<const BasicForwardOutput<Scalar>> outputs,
                                   std::span<const std::int64_t> growth) {
  using namespace numcore;
  detail::check_batch(outputs, growth);
  auto& tape = outputs.front().pred_gat.tape();
  std::optional<BasicNodeRef<Scalar>> total;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto& o = outputs[i];
    const auto y = detail::log_target(tape, growth[i]);
    const auto term = add(hadamard(o.w1, detail::squared(sub(o.pred_gat, y))),
                          hadamard(o.w2, detail::squared(sub(o.pred_att, y))));
    total = total ? add(*total, term) : term;
  }
  return scale(*total, Scalar(1) / static_cast<Scalar>(outputs.size()));
}

/// mean_i (combined_i - y_i)^2, the objective that trains w1 and w2.
template <typename Scalar>
numcore::BasicNodeRef<Scalar> fusion_loss(std::span<const BasicForwardOutput<Scalar>> outputs,
                                          std::span<const std::int64_t> growth) {
  using namespace numcore;
  detail::check_batch(outputs, growth);
  auto& tape = outputs.front().pred_gat.tape();
  std::optional<BasicNodeRef<Scalar>> total;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto term = detail::squared(sub(outputs[i].pred_combined, detail::log_target(tape, growth[i])));
    total = total ? add(*total, term) : term;
  }
  return scale(*total, Scalar(1) / static_cast<Scalar>(outputs.size()));
}

using BoundParams = BasicBoundParams<double>;
using ForwardOutput = BasicForwardOutput<double>;

/// Gradients of the named parameters after a backward sweep.
Gradients collect_gradients(const BoundParams& params);

/// Gradient of one cascade's training objective: the weighted head loss for
/// every network weight, the fused-prediction error for w1 and w2.
struct CascadeGradient {
  Gradients grads;
  double loss = 0.0;
  double fusion_loss = 0.0;
};
CascadeGradient cascade_gradient(const ModelParams& params, const ModelConfig& config,
                                 const GraphInputs& inputs, std::int64_t growth);

/// Config, weights and the feature standardization fitted on training data.
struct Model {
  ModelConfig config;
  ModelParams params;
  data::FeatureNormalizer normalizer;
};

struct Prediction {
  double gat = 0.0;
  double att = 0.0;
  double combined = 0.0;
};

/// Inference on already-prepared inputs.
Prediction predict(const ModelParams& params, const ModelConfig& config, const GraphInputs& inputs);
/// Inference on a raw (unstandardized) cascade.
Prediction predict(const Model& model, const data::CascadeGraph& cascade);

}  // namespace ccasgnn::model
