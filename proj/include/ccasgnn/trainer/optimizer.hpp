#pragma once

#include "ccasgnn/model/params.hpp"

namespace ccasgnn::trainer {

struct AdamConfig {
  double learning_rate = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adaptive moment estimation with bias correction. Moment estimates are
/// kept per parameter name; only names present in the gradient are updated.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  void step(model::NamedTensors& params, const model::NamedTensors& grads);
  long steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  model::NamedTensors first_;
  model::NamedTensors second_;
  long steps_ = 0;
};

/// Rescales all gradients together so their joint L2 norm is at most
/// `max_norm`. Returns the norm before clipping.
double clip_global_norm(model::NamedTensors& grads, double max_norm);

}  // namespace ccasgnn::trainer
