#include "ccasgnn/model/ccasgnn.hpp"

#include <array>
#include <optional>

#include "ccasgnn/errors.hpp"

namespace ccasgnn::model {
using numcore::Tape;

GraphInputs prepare_inputs(const data::CascadeGraph& cascade, const ModelConfig& config) {
  const int n = cascade.size();
  GraphInputs in;
  in.features = cascade.features;
  if (config.uses_pe()) in.pe = positional_encoding(cascade.positions, config.pe_dim);
  in.neighborhood = attention_neighborhood(cascade.edges, n);
  in.laplacian = normalized_laplacian(cascade.edges, n);
  return in;
}

Gradients collect_gradients(const BoundParams& params) {
  Gradients g;
  for (const auto& [name, ref] : params.refs) g.tensors.emplace(name, params.tape->grad(ref));
  return g;
}

CascadeGradient cascade_gradient(const ModelParams& params, const ModelConfig& config,
                                 const GraphInputs& inputs, std::int64_t growth) {
  Tape tape;
  const BoundParams bound = bind_params(tape, params, config, true);
  const ForwardOutput out = forward<double>(bound, inputs, config);
  const std::array<ForwardOutput, 1> batch{out};
  const std::array<std::int64_t, 1> labels{growth};

  CascadeGradient result;
  const NodeRef head_loss = loss<double>(batch, labels);
  tape.backward(head_loss);
  result.grads = collect_gradients(bound);
  result.loss = head_loss.item();

  const NodeRef fused = fusion_loss<double>(batch, labels);
  tape.backward(fused);
  result.grads.at(kFusionW1) = tape.grad(bound.at(kFusionW1));
  result.grads.at(kFusionW2) = tape.grad(bound.at(kFusionW2));
  result.fusion_loss = fused.item();
  return result;
}

Prediction predict(const ModelParams& params, const ModelConfig& config, const GraphInputs& inputs) {
  Tape tape;
  const BoundParams bound = bind_params(tape, params, config, false);
  const ForwardOutput out = forward<double>(bound, inputs, config);
  return {out.gat(), out.att(), out.combined()};
}

Prediction predict(const Model& model, const data::CascadeGraph& cascade) {
  return predict(model.params, model.config, prepare_inputs(model.normalizer.apply(cascade), model.config));
}

}  // namespace ccasgnn::model
