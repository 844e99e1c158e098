#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ccasgnn/data/cascade.hpp"
#include "ccasgnn/errors.hpp"
#include "ccasgnn/model/config.hpp"
#include "ccasgnn/numcore/ops.hpp"

namespace ccasgnn::model {

using numcore::NodeRef;

/// Sinusoidal encodings of activation ranks:
///   PE(p, 2i) = sin(p / 1000^(2i/d_p)),  PE(p, 2i+1) = cos(p / 1000^(2i/d_p)).
/// The base is 1000. d_p must be even.
Eigen::MatrixXd positional_encoding(std::span<const int> positions, int pe_dim);

/// Angular frequency of encoding pair i.
double pe_frequency(int pair, int pe_dim);

/// Dense 0/1 adjacency with both directions of every edge, no self-loops.
Eigen::MatrixXd symmetric_adjacency(std::span<const data::Edge> edges, int n);

/// I - D^{-1/2} A D^{-1/2} of a symmetric adjacency; degree-0 nodes use
/// 0^{-1/2} = 0, leaving an identity row.
Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& adjacency);
Eigen::MatrixXd normalized_laplacian(std::span<const data::Edge> edges, int n);

/// Symmetrized neighborhoods including self, for attention masking.
numcore::BoolMask attention_neighborhood(std::span<const data::Edge> edges, int n);

template <typename Scalar>
numcore::BasicNodeRef<Scalar> activate(const numcore::BasicNodeRef<Scalar>& x, Activation a) {
  switch (a) {
    case Activation::kRelu: return numcore::relu(x);
    case Activation::kElu: return numcore::elu(x);
    case Activation::kIdentity: return x;
  }
  return x;
}

template <typename Scalar>
struct GatLayerOutput {
  numcore::BasicNodeRef<Scalar> hidden;
  /// alpha(v, u): weight of neighbor u in node v's update; rows sum to 1.
  numcore::BasicNodeRef<Scalar> attention;
};

/// h'_v = act( sum_{u in N(v)} alpha(v,u) * W (h_u || PE_u) ), with
/// alpha(v, .) = softmax over N(v) of leaky_relu(a_self . z_v + a_nbr . z_u)
/// and z = (h || PE) W. `weight` is (d_in + d_p) x d_out, `attention` is
/// 2 d_out x 1 (self half first). Without `pe` the concatenation is skipped.
template <typename Scalar>
GatLayerOutput<Scalar> gat_layer(const numcore::BasicNodeRef<Scalar>& h_prev,
                                 const std::optional<numcore::BasicNodeRef<Scalar>>& pe,
                                 const numcore::BoolMask& neighborhood,
                                 const numcore::BasicNodeRef<Scalar>& weight,
                                 const numcore::BasicNodeRef<Scalar>& attention, Scalar leaky_slope,
                                 Activation act) {
  using namespace numcore;
  const auto input = pe ? concat_cols(h_prev, *pe) : h_prev;
  const auto z = matmul(input, weight);
  const Eigen::Index d = z.cols();
  if (attention.rows() != 2 * d || attention.cols() != 1) {
    throw DimensionError("gat_layer: attention vector " + shape_string(attention.value()) +
                         " does not match projected width " + std::to_string(d));
  }
  const auto self_score = matmul(z, slice_rows(attention, 0, d));
  const auto neighbor_score = matmul(z, slice_rows(attention, d, d));
  const auto scores = leaky_relu(outer_add(self_score, transpose(neighbor_score)), leaky_slope);
  const auto alpha = masked_row_softmax(scores, neighborhood);
  return {activate(matmul(alpha, z), act), alpha};
}

/// H' = act( L (H || PE) W^T + b ); `weight` is d_out x (d_in + d_p), `bias`
/// is 1 x d_out.
template <typename Scalar>
numcore::BasicNodeRef<Scalar> gcn_layer(const numcore::BasicNodeRef<Scalar>& h_prev,
                                        const std::optional<numcore::BasicNodeRef<Scalar>>& pe,
                                        const numcore::BasicNodeRef<Scalar>& laplacian,
                                        const numcore::BasicNodeRef<Scalar>& weight,
                                        const numcore::BasicNodeRef<Scalar>& bias, Activation act) {
  using namespace numcore;
  const auto input = pe ? concat_cols(h_prev, *pe) : h_prev;
  return activate(add_row_broadcast(matmul(matmul(laplacian, input), transpose(weight)), bias), act);
}

template <typename Scalar>
struct AttentionHead {
  numcore::BasicNodeRef<Scalar> query;  // F' x d
  numcore::BasicNodeRef<Scalar> key;    // F' x d
  numcore::BasicNodeRef<Scalar> value;  // F' x d
};

template <typename Scalar>
struct MultiHeadOutput {
  numcore::BasicNodeRef<Scalar> hidden;  // n x d, average of head outputs
  std::vector<numcore::BasicNodeRef<Scalar>> attention;  // per head, n x n
};

/// Per head: softmax(Q K^T / sqrt(d_k)) V with Q = H Wq, K = H Wk, V = H Wv;
/// heads are averaged.
template <typename Scalar>
MultiHeadOutput<Scalar> multi_head_attention(const numcore::BasicNodeRef<Scalar>& h,
                                             std::span<const AttentionHead<Scalar>> heads) {
  using namespace numcore;
  if (heads.empty()) throw ContractViolation("multi_head_attention: no heads");
  MultiHeadOutput<Scalar> out;
  std::optional<BasicNodeRef<Scalar>> total;
  for (const auto& head : heads) {
    const auto q = matmul(h, head.query);
    const auto k = matmul(h, head.key);
    const auto v = matmul(h, head.value);
    const Scalar inv_sqrt_dk = Scalar(1) / std::sqrt(static_cast<Scalar>(k.cols()));
    const auto att = row_softmax(scale(matmul(q, transpose(k)), inv_sqrt_dk));
    const auto head_out = matmul(att, v);
    out.attention.push_back(att);
    total = total ? add(*total, head_out) : head_out;
  }
  out.hidden = scale(*total, Scalar(1) / static_cast<Scalar>(heads.size()));
  return out;
}

/// Affine layers with ReLU between them and a linear last layer.
template <typename Scalar>
numcore::BasicNodeRef<Scalar> mlp(const numcore::BasicNodeRef<Scalar>& x,
                                  std::span<const numcore::BasicNodeRef<Scalar>> weights,
                                  std::span<const numcore::BasicNodeRef<Scalar>> biases) {
  using namespace numcore;
  if (weights.size() != biases.size() || weights.empty()) {
    throw ContractViolation("mlp: weights and biases must pair up");
  }
  auto h = x;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    h = add_row_broadcast(matmul(h, weights[k]), biases[k]);
    if (k + 1 < weights.size()) h = relu(h);
  }
  return h;
}

}  // namespace ccasgnn::model
