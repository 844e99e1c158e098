#include "ccasgnn/baselines/deep.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "ccasgnn/errors.hpp"
#include "ccasgnn/model/layers.hpp"
#include "ccasgnn/numcore/ops.hpp"
#include "ccasgnn/trainer/optimizer.hpp"

namespace ccasgnn::baselines {

using numcore::NodeRef;
using numcore::Tape;

std::vector<std::string> DeepConfig::issues() const {
  std::vector<std::string> out;
  if (!(learning_rate >= 0.0)) out.push_back("deep.learning_rate must be >= 0");
  if (epochs < 0) out.push_back("deep.epochs must be >= 0");
  if (batch_size < 0) out.push_back("deep.batch_size must be >= 0");
  for (int h : hidden) {
    if (h <= 0) out.push_back("deep.hidden widths must be positive");
  }
  return out;
}

nlohmann::json to_json(const DeepConfig& c) {
  return {{"hidden", c.hidden},         {"learning_rate", c.learning_rate}, {"epochs", c.epochs},
          {"batch_size", c.batch_size}, {"seed", c.seed}};
}

namespace {

int layer_count(const std::vector<int>& hidden) { return static_cast<int>(hidden.size()) + 1; }

NodeRef forward(Tape& tape, const model::NamedTensors& params, const std::vector<int>& hidden,
                const Eigen::MatrixXd& x, bool trainable, std::map<std::string, NodeRef>* leaves) {
  std::vector<NodeRef> weights;
  std::vector<NodeRef> biases;
  auto leaf = [&](const std::string& name) {
    NodeRef r = trainable ? tape.parameter(params.at(name)) : tape.constant(params.at(name));
    if (leaves) leaves->emplace(name, r);
    return r;
  };
  for (int k = 0; k < layer_count(hidden); ++k) {
    weights.push_back(leaf(model::mlp_weight(kDeepStack, k)));
    biases.push_back(leaf(model::mlp_bias(kDeepStack, k)));
  }
  return model::mlp<double>(tape.constant(x), weights, biases);
}

}  // namespace

Eigen::VectorXd DeepFit::predict(const Eigen::MatrixXd& x) const {
  Tape tape;
  return forward(tape, params, hidden, x, false, nullptr).value();
}

DeepFit fit_deep(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const DeepConfig& config) {
  if (auto issues = config.issues(); !issues.empty()) throw ConfigError(std::move(issues));
  if (x.rows() == 0) throw ContractViolation("fit_deep: no training samples");
  if (x.rows() != y.size()) throw DimensionError("fit_deep: X and y have different row counts");

  std::mt19937_64 rng(config.seed);
  DeepFit fit;
  fit.hidden = config.hidden;
  model::add_mlp(fit.params, kDeepStack, static_cast<int>(x.cols()), config.hidden, rng);

  trainer::Adam adam({.learning_rate = config.learning_rate});
  const auto n = static_cast<std::size_t>(x.rows());
  const std::size_t batch = config.batch_size == 0 ? n : std::min(n, static_cast<std::size_t>(config.batch_size));
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      const std::vector<Eigen::Index> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(start + len));
      Tape tape;
      std::map<std::string, NodeRef> leaves;
      const NodeRef pred = forward(tape, fit.params, fit.hidden, x(rows, Eigen::all), true, &leaves);
      const NodeRef residual = numcore::sub(pred, tape.constant(y(rows)));
      const NodeRef loss = numcore::scale(numcore::sum(numcore::hadamard(residual, residual)),
                                          1.0 / static_cast<double>(len));
      if (!std::isfinite(loss.item())) throw NumericalError("fit_deep: loss diverged");
      tape.backward(loss);
      model::NamedTensors grads;
      for (const auto& [name, ref] : leaves) grads.tensors[name] = tape.grad(ref);
      adam.step(fit.params, grads);
      ++fit.steps;
    }
  }
  return fit;
}

double squared_log_error(const DeepFit& fit, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return (fit.predict(x) - y).squaredNorm() / static_cast<double>(y.size());
}

FeatureDeep FeatureDeep::train(std::span<const data::CascadeGraph> cascades, const DeepConfig& config) {
  const Eigen::MatrixXd x = feature_matrix(cascades);
  FeatureDeep m;
  m.scaler = FeatureScaler::fit(x);
  m.fit = fit_deep(m.scaler.apply(x), log_targets(cascades), config);
  return m;
}

double FeatureDeep::predict(const data::CascadeGraph& cascade) const {
  const Eigen::MatrixXd x = extract_features(cascade).as_row();
  return fit.predict(scaler.apply(x))(0);
}

}  // namespace ccasgnn::baselines
