#include "ccasgnn/trainer/optimizer.hpp"

#include <cmath>

namespace ccasgnn::trainer {

void Adam::step(model::NamedTensors& params, const model::NamedTensors& grads) {
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double correct1 = 1.0 - std::pow(config_.beta1, t);
  const double correct2 = 1.0 - std::pow(config_.beta2, t);
  for (const auto& [name, g] : grads.tensors) {
    Eigen::MatrixXd& p = params.at(name);
    auto [m_it, m_new] = first_.tensors.try_emplace(name, Eigen::MatrixXd::Zero(g.rows(), g.cols()));
    auto [v_it, v_new] = second_.tensors.try_emplace(name, Eigen::MatrixXd::Zero(g.rows(), g.cols()));
    Eigen::MatrixXd& m = m_it->second;
    Eigen::MatrixXd& v = v_it->second;
    m = config_.beta1 * m + (1.0 - config_.beta1) * g;
    v = config_.beta2 * v + (1.0 - config_.beta2) * g.cwiseProduct(g);
    const Eigen::ArrayXXd m_hat = m.array() / correct1;
    const Eigen::ArrayXXd v_hat = v.array() / correct2;
    p.array() -= config_.learning_rate * m_hat / (v_hat.sqrt() + config_.epsilon);
  }
}

double clip_global_norm(model::NamedTensors& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (max_norm > 0.0 && norm > max_norm) grads *= max_norm / norm;
  return norm;
}

}  // namespace ccasgnn::trainer
