#include "ccasgnn/model/params.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ccasgnn::model {

const Eigen::MatrixXd& NamedTensors::at(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw std::out_of_range("no parameter named " + name);
  return it->second;
}

Eigen::MatrixXd& NamedTensors::at(const std::string& name) {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw std::out_of_range("no parameter named " + name);
  return it->second;
}

std::size_t NamedTensors::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, m] : tensors) n += static_cast<std::size_t>(m.size());
  return n;
}

bool NamedTensors::all_finite() const {
  for (const auto& [name, m] : tensors) {
    if (!m.allFinite()) return false;
  }
  return true;
}

double NamedTensors::squared_norm() const {
  double s = 0.0;
  for (const auto& [name, m] : tensors) s += m.squaredNorm();
  return s;
}

NamedTensors NamedTensors::zeros_like() const {
  NamedTensors out;
  for (const auto& [name, m] : tensors) out.tensors.emplace(name, Eigen::MatrixXd::Zero(m.rows(), m.cols()));
  return out;
}

NamedTensors& NamedTensors::operator+=(const NamedTensors& other) {
  for (const auto& [name, m] : other.tensors) {
    auto it = tensors.find(name);
    if (it == tensors.end()) {
      tensors.emplace(name, m);
    } else {
      it->second += m;
    }
  }
  return *this;
}

NamedTensors& NamedTensors::operator*=(double s) {
  for (auto& [name, m] : tensors) m *= s;
  return *this;
}

bool operator==(const NamedTensors& a, const NamedTensors& b) {
  if (a.tensors.size() != b.tensors.size()) return false;
  for (auto ia = a.tensors.begin(), ib = b.tensors.begin(); ia != a.tensors.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (ia->second.rows() != ib->second.rows() || ia->second.cols() != ib->second.cols()) return false;
    if (ia->second != ib->second) return false;
  }
  return true;
}

namespace {

NamedTensors pairwise_range(std::span<const NamedTensors> parts) {
  if (parts.size() == 1) return parts.front();
  const std::size_t mid = parts.size() / 2;
  NamedTensors left = pairwise_range(parts.first(mid));
  left += pairwise_range(parts.subspan(mid));
  return left;
}

}  // namespace

NamedTensors pairwise_sum(std::span<const NamedTensors> parts) {
  if (parts.empty()) return {};
  return pairwise_range(parts);
}

std::string gat_weight(int layer) { return "gat." + std::to_string(layer) + ".W"; }
std::string gat_attention(int layer) { return "gat." + std::to_string(layer) + ".a"; }
std::string gcn_weight(int layer) { return "gcn." + std::to_string(layer) + ".W"; }
std::string gcn_bias(int layer) { return "gcn." + std::to_string(layer) + ".b"; }
std::string head_query(int head) { return "head." + std::to_string(head) + ".Wq"; }
std::string head_key(int head) { return "head." + std::to_string(head) + ".Wk"; }
std::string head_value(int head) { return "head." + std::to_string(head) + ".Wv"; }
std::string mlp_weight(const std::string& stack, int layer) {
  return stack + "." + std::to_string(layer) + ".W";
}
std::string mlp_bias(const std::string& stack, int layer) {
  return stack + "." + std::to_string(layer) + ".b";
}

Eigen::MatrixXd glorot_uniform(Eigen::Index rows, Eigen::Index cols, double fan_in, double fan_out,
                       std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  }
  return m;
}

void add_mlp(NamedTensors& p, const std::string& stack, int in, const std::vector<int>& hidden,
             std::mt19937_64& rng) {
  int width = in;
  int layer = 0;
  auto add_layer = [&](int out) {
    p.tensors[mlp_weight(stack, layer)] = glorot_uniform(width, out, width, out, rng);
    p.tensors[mlp_bias(stack, layer)] = Eigen::MatrixXd::Zero(1, out);
    width = out;
    ++layer;
  };
  for (int h : hidden) add_layer(h);
  add_layer(1);
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  ModelParams p;
  const int pe = config.uses_pe() ? config.pe_dim : 0;

  if (config.uses_gat()) {
    int in = config.feature_dim;
    for (int l = 0; l < config.gnn_layers; ++l) {
      const int out = config.gat_hidden[static_cast<std::size_t>(l)];
      p.tensors[gat_weight(l)] = glorot_uniform(in + pe, out, in + pe, out, rng);
      p.tensors[gat_attention(l)] = glorot_uniform(2 * out, 1, 2 * out, 1, rng);
      in = out;
    }
    add_mlp(p, kMlpGat, in, config.mlp_hidden, rng);
  }
  if (config.uses_gcn()) {
    int in = config.feature_dim;
    for (int l = 0; l < config.gnn_layers; ++l) {
      const int out = config.gcn_hidden[static_cast<std::size_t>(l)];
      p.tensors[gcn_weight(l)] = glorot_uniform(out, in + pe, in + pe, out, rng);
      p.tensors[gcn_bias(l)] = Eigen::MatrixXd::Zero(1, out);
      in = out;
    }
    for (int h = 0; h < config.heads; ++h) {
      p.tensors[head_query(h)] = glorot_uniform(in, config.head_dim, in, config.head_dim, rng);
      p.tensors[head_key(h)] = glorot_uniform(in, config.head_dim, in, config.head_dim, rng);
      p.tensors[head_value(h)] = glorot_uniform(in, config.head_dim, in, config.head_dim, rng);
    }
    add_mlp(p, kMlpAtt, config.head_dim, config.mlp_hidden, rng);
  }
  p.tensors[kFusionW1] = Eigen::MatrixXd::Constant(1, 1, config.uses_gat() ? 0.5 : 0.0);
  p.tensors[kFusionW2] = Eigen::MatrixXd::Constant(1, 1, config.uses_gcn() ? 0.5 : 0.0);
  return p;
}

bool is_trainable(const ModelConfig& config, const std::string& name) {
  if (name == kFusionW1) return config.uses_gat();
  if (name == kFusionW2) return config.uses_gcn();
  return true;
}

}  // namespace ccasgnn::model
