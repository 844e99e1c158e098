#include "ccasgnn/model/gradcheck.hpp"

#include <array>
#include <chrono>
#include <random>

#include "ccasgnn/numcore/finite_difference.hpp"

namespace ccasgnn::model {
using numcore::Tape;

std::vector<std::string> GradcheckReport::failures() const {
  std::vector<std::string> out;
  for (const auto& g : groups) {
    if (!g.passed) out.push_back(g.name);
  }
  return out;
}

data::CascadeGraph gradcheck_cascade(int feature_dim, std::uint64_t seed, int nodes) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  data::CascadeGraph g;
  g.cascade_id = "gradcheck";
  g.features.resize(nodes, feature_dim);
  for (int i = 0; i < nodes; ++i) {
    g.node_ids.push_back("u" + std::to_string(i));
    g.positions.push_back(i);
    g.activation_times.push_back(0.1 * i);
    for (int k = 0; k < feature_dim; ++k) g.features(i, k) = gauss(rng);
    if (i > 0) {
      std::uniform_int_distribution<int> parent(0, i - 1);
      g.edges.push_back({parent(rng), i});
    }
  }
  g.growth_label = 5;
  return g;
}

namespace {

// The finite-difference side runs in extended precision: at the fixed
// 1e-5 step, double rounding noise (~eps * |loss| / step) would swamp
// gradient entries of order 1e-7.
using Wide = long double;

struct Objectives {
  Wide head = 0;
  Wide fusion = 0;
};

Objectives evaluate(const ModelParams& params, const ModelConfig& config, const GraphInputs& inputs,
                    std::int64_t growth) {
  numcore::BasicTape<Wide> tape;
  const auto bound = bind_params<Wide>(tape, params, config, false);
  const std::array<BasicForwardOutput<Wide>, 1> batch{forward<Wide>(bound, inputs, config)};
  const std::array<std::int64_t, 1> labels{growth};
  return {loss<Wide>(batch, labels).item(), fusion_loss<Wide>(batch, labels).item()};
}

}  // namespace

GradcheckReport gradcheck(const data::CascadeGraph& cascade, const ModelParams& params,
                          const ModelConfig& config, const GradcheckOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const GraphInputs inputs = prepare_inputs(cascade, config);
  const std::array<std::int64_t, 1> labels{cascade.growth_label};

  Tape tape;
  tape.corrupt_rule(options.corrupt);
  const BoundParams bound = bind_params(tape, params, config, true);
  const std::array<ForwardOutput, 1> batch{forward<double>(bound, inputs, config)};
  const NodeRef head = loss<double>(batch, labels);
  const NodeRef fused = fusion_loss<double>(batch, labels);
  tape.backward(head);
  const Gradients head_grads = collect_gradients(bound);
  tape.backward(fused);
  const Gradients fusion_grads = collect_gradients(bound);

  GradcheckReport report;
  ModelParams probe = params;
  for (auto& [name, value] : probe.tensors) {
    if (!is_trainable(config, name)) continue;
    Eigen::MatrixXd fd_head(value.rows(), value.cols());
    Eigen::MatrixXd fd_fusion(value.rows(), value.cols());
    // One pass over the entries yields both objectives' differences.
    for (Eigen::Index k = 0; k < value.size(); ++k) {
      double& x = value.data()[k];
      const double saved = x;
      x = saved + options.step;
      const Objectives up = evaluate(probe, config, inputs, cascade.growth_label);
      x = saved - options.step;
      const Objectives down = evaluate(probe, config, inputs, cascade.growth_label);
      x = saved;
      const Wide h = static_cast<Wide>(saved + options.step) - static_cast<Wide>(saved - options.step);
      fd_head.data()[k] = static_cast<double>((up.head - down.head) / h);
      fd_fusion.data()[k] = static_cast<double>((up.fusion - down.fusion) / h);
    }
    const auto a = numcore::compare_gradients<double>(head_grads.at(name), fd_head, options.rel_tol,
                                                      options.abs_floor);
    const auto b = numcore::compare_gradients<double>(fusion_grads.at(name), fd_fusion,
                                                      options.rel_tol, options.abs_floor);
    GradcheckGroup group;
    group.name = name;
    group.worst_relative = std::max(a.worst_relative, b.worst_relative);
    group.worst_absolute = std::max(a.worst_absolute, b.worst_absolute);
    group.passed = a.passed && b.passed;
    report.passed = report.passed && group.passed;
    report.worst_relative = std::max(report.worst_relative, group.worst_relative);
    report.groups.push_back(std::move(group));
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace ccasgnn::model
