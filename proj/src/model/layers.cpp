#include "ccasgnn/model/layers.hpp"

#include <cmath>

#include "ccasgnn/errors.hpp"

namespace ccasgnn::model {

double pe_frequency(int pair, int pe_dim) {
  return std::pow(1000.0, -2.0 * static_cast<double>(pair) / static_cast<double>(pe_dim));
}

Eigen::MatrixXd positional_encoding(std::span<const int> positions, int pe_dim) {
  if (pe_dim <= 0 || pe_dim % 2 != 0) {
    throw ConfigError({"pe_dim must be a positive even number, got " + std::to_string(pe_dim)});
  }
  const auto n = static_cast<Eigen::Index>(positions.size());
  Eigen::MatrixXd pe(n, pe_dim);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double p = positions[static_cast<std::size_t>(r)];
    for (int i = 0; i < pe_dim / 2; ++i) {
      const double angle = p * pe_frequency(i, pe_dim);
      pe(r, 2 * i) = std::sin(angle);
      pe(r, 2 * i + 1) = std::cos(angle);
    }
  }
  return pe;
}

Eigen::MatrixXd symmetric_adjacency(std::span<const data::Edge> edges, int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const data::Edge& e : edges) {
    if (e.src == e.dst) continue;
    a(e.src, e.dst) = 1.0;
    a(e.dst, e.src) = 1.0;
  }
  return a;
}

Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw DimensionError("normalized_laplacian: adjacency is " + numcore::shape_string(adjacency));
  }
  const Eigen::VectorXd degree = adjacency.rowwise().sum();
  const Eigen::VectorXd inv_sqrt =
      degree.unaryExpr([](double d) { return d > 0.0 ? 1.0 / std::sqrt(d) : 0.0; });
  Eigen::MatrixXd lap = -(inv_sqrt.asDiagonal() * adjacency * inv_sqrt.asDiagonal());
  lap.diagonal().array() += 1.0;
  return lap;
}

Eigen::MatrixXd normalized_laplacian(std::span<const data::Edge> edges, int n) {
  return normalized_laplacian(symmetric_adjacency(edges, n));
}

numcore::BoolMask attention_neighborhood(std::span<const data::Edge> edges, int n) {
  numcore::BoolMask mask = numcore::BoolMask::Constant(n, n, false);
  for (int i = 0; i < n; ++i) mask(i, i) = true;
  for (const data::Edge& e : edges) {
    mask(e.src, e.dst) = true;
    mask(e.dst, e.src) = true;
  }
  return mask;
}

}  // namespace ccasgnn::model
