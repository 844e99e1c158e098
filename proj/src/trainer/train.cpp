#include "ccasgnn/trainer/train.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "ccasgnn/trainer/optimizer.hpp"

namespace ccasgnn::trainer {
using nlohmann::json;

std::vector<std::string> TrainConfig::issues() const {
  std::vector<std::string> out;
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) out.push_back("learning_rate must be >= 0");
  if (epochs < 0) out.push_back("epochs must be >= 0");
  if (batch_size < 1) out.push_back("batch_size must be >= 1");
  if (patience < 1) out.push_back("patience must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) out.push_back("beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) out.push_back("beta2 must be in [0, 1)");
  if (!(epsilon > 0.0)) out.push_back("epsilon must be > 0");
  if (!(clip_norm >= 0.0)) out.push_back("clip_norm must be >= 0");
  if (max_steps < 0) out.push_back("max_steps must be >= 0");
  return out;
}

void TrainConfig::validate() const {
  if (auto found = issues(); !found.empty()) throw ConfigError(std::move(found));
}

json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"epochs", c.epochs},   {"batch_size", c.batch_size},
          {"patience", c.patience},           {"seed", c.seed},       {"beta1", c.beta1},
          {"beta2", c.beta2},                 {"epsilon", c.epsilon}, {"clip_norm", c.clip_norm},
          {"max_steps", c.max_steps},         {"standardize", c.standardize}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.patience = j.value("patience", c.patience);
  c.seed = j.value("seed", c.seed);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.standardize = j.value("standardize", c.standardize);
  return c;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<model::GraphInputs> prepare_all(std::span<const data::CascadeGraph> cascades,
                                            const model::Model& m) {
  std::vector<model::GraphInputs> out;
  out.reserve(cascades.size());
  for (const auto& g : cascades) out.push_back(model::prepare_inputs(m.normalizer.apply(g), m.config));
  return out;
}

double validation_msle(const model::Model& m, std::span<const model::GraphInputs> inputs,
                       std::span<const data::CascadeGraph> cascades) {
  std::vector<double> pred;
  std::vector<double> truth;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    pred.push_back(model::predict(m.params, m.config, inputs[i]).combined);
    truth.push_back(data::log_growth(cascades[i].growth_label));
  }
  return msle(pred, truth);
}

}  // namespace

TrainResult train(const data::DatasetSplit& split, const model::ModelConfig& config,
                  const TrainConfig& tc, const EpochCallback& on_epoch) {
  const auto start = Clock::now();
  config.validate();
  tc.validate();
  if (split.train.empty()) throw ContractViolation("train: empty training split");

  model::Model current{config, model::init_params(config, tc.seed),
                       tc.standardize ? data::FeatureNormalizer::fit(split.train)
                                      : data::FeatureNormalizer::identity(config.feature_dim)};
  const auto train_inputs = prepare_all(split.train, current);
  const auto val_inputs = prepare_all(split.validation, current);

  Adam adam({tc.learning_rate, tc.beta1, tc.beta2, tc.epsilon});
  std::mt19937_64 rng(tc.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(split.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  model::Model best = current;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  bool out_of_steps = false;
  const auto batch = static_cast<std::size_t>(tc.batch_size);

  for (int epoch = 1; epoch <= tc.epochs && !out_of_steps; ++epoch) {
    const auto epoch_start = Clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    double loss_total = 0.0;
    double fusion_total = 0.0;
    std::size_t seen = 0;

    for (std::size_t b = 0; b < order.size() && !out_of_steps; b += batch) {
      const std::size_t len = std::min(batch, order.size() - b);
      std::vector<model::Gradients> parts;
      parts.reserve(len);
      for (std::size_t k = b; k < b + len; ++k) {
        const std::size_t i = order[k];
        auto g = model::cascade_gradient(current.params, config, train_inputs[i], split.train[i].growth_label);
        if (!std::isfinite(g.loss) || !std::isfinite(g.fusion_loss) || !g.grads.all_finite()) {
          throw TrainingDiverged("train: non-finite loss or gradient at cascade " + split.train[i].cascade_id,
                                 current, epoch, result.steps);
        }
        loss_total += g.loss;
        fusion_total += g.fusion_loss;
        parts.push_back(std::move(g.grads));
      }
      seen += len;

      model::Gradients grads = model::pairwise_sum(parts);
      grads *= 1.0 / static_cast<double>(len);
      for (auto it = grads.tensors.begin(); it != grads.tensors.end();) {
        it = model::is_trainable(config, it->first) ? std::next(it) : grads.tensors.erase(it);
      }
      clip_global_norm(grads, tc.clip_norm);

      model::Model before = current;
      adam.step(current.params, grads);
      ++result.steps;
      if (!current.params.all_finite()) {
        throw TrainingDiverged("train: parameters became non-finite", std::move(before), epoch, result.steps);
      }
      if (tc.max_steps > 0 && result.steps >= tc.max_steps) out_of_steps = true;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.steps = result.steps;
    stats.train_loss = loss_total / static_cast<double>(seen);
    stats.train_fusion_loss = fusion_total / static_cast<double>(seen);
    stats.validation_msle = std::numeric_limits<double>::quiet_NaN();
    if (!val_inputs.empty()) {
      stats.validation_msle = validation_msle(current, val_inputs, split.validation);
      if (!std::isfinite(stats.validation_msle)) {
        throw TrainingDiverged("train: validation MSLE is not finite", best, epoch, result.steps);
      }
      if (stats.validation_msle < best_val) {
        best_val = stats.validation_msle;
        best = current;
        result.best_epoch = epoch;
        since_best = 0;
      } else {
        ++since_best;
      }
    } else {
      best = current;
      result.best_epoch = epoch;
    }
    stats.seconds = seconds_since(epoch_start);
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
    if (since_best >= tc.patience) {
      result.stopped_early = true;
      break;
    }
  }

  result.model = std::move(best);
  result.report = evaluate(result.model, split);
  result.report.config = {{"model", model::to_json(config)}, {"train", to_json(tc)}};
  result.report.wall_clock_seconds = seconds_since(start);
  return result;
}

PredictionReport evaluate(const model::Model& m, std::span<const data::CascadeGraph> cascades,
                          const std::string& split) {
  const auto start = Clock::now();
  PredictionReport r;
  r.model = "CCasGNN";
  if (m.config.variant != model::Variant::kFull) r.model += std::string("-") + std::string(model::to_string(m.config.variant));
  for (const auto& g : cascades) {
    const model::Prediction p = model::predict(m, g);
    r.entries.push_back({g.cascade_id, split, data::log_growth(g.growth_label), p.combined, p.gat, p.att});
  }
  r.w1 = m.params.at(model::kFusionW1)(0, 0);
  r.w2 = m.params.at(model::kFusionW2)(0, 0);
  r.config = {{"model", model::to_json(m.config)}};
  r.recompute_msle();
  r.wall_clock_seconds = seconds_since(start);
  return r;
}

PredictionReport evaluate(const model::Model& m, const data::DatasetSplit& split) {
  PredictionReport r = evaluate(m, split.train, kTrainSplit);
  r.merge(evaluate(m, split.validation, kValidationSplit));
  r.merge(evaluate(m, split.test, kTestSplit));
  return r;
}

}  // namespace ccasgnn::trainer
