#include "ccasgnn/data/transforms.hpp"

#include <array>
#include <random>
#include <stdexcept>

namespace ccasgnn::data {

CascadeGraph edge_dropout(const CascadeGraph& cascade, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("edge_dropout: rate must lie in [0, 1), got " + std::to_string(rate));
  }
  CascadeGraph out = cascade;
  if (rate == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution drop(rate);
  const int r = cascade.root();
  out.edges.clear();
  for (const Edge& e : cascade.edges) {
    if (e.src == r || e.dst == r || !drop(rng)) out.edges.push_back(e);
  }
  return out;
}

std::vector<CascadeGraph> edge_dropout(std::span<const CascadeGraph> corpus, double rate,
                                       std::uint64_t seed) {
  std::vector<CascadeGraph> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::uint64_t derived = 0;
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    derived = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    out.push_back(edge_dropout(corpus[i], rate, derived));
  }
  return out;
}

FeatureNormalizer FeatureNormalizer::fit(std::span<const CascadeGraph> cascades) {
  if (cascades.empty()) throw std::invalid_argument("FeatureNormalizer::fit: no cascades");
  const Eigen::Index f = cascades.front().features.cols();
  Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(f);
  double rows = 0.0;
  for (const auto& g : cascades) {
    total += g.features.colwise().sum();
    rows += static_cast<double>(g.features.rows());
  }
  FeatureNormalizer norm;
  norm.mean = total / rows;
  Eigen::RowVectorXd sq = Eigen::RowVectorXd::Zero(f);
  for (const auto& g : cascades) {
    sq += (g.features.rowwise() - norm.mean).array().square().colwise().sum().matrix();
  }
  norm.scale = (sq / rows).array().sqrt().matrix();
  for (Eigen::Index k = 0; k < f; ++k) {
    if (norm.scale(k) < 1e-12) norm.scale(k) = 1.0;
  }
  return norm;
}

FeatureNormalizer FeatureNormalizer::identity(int feature_dim) {
  return {Eigen::RowVectorXd::Zero(feature_dim), Eigen::RowVectorXd::Ones(feature_dim)};
}

CascadeGraph FeatureNormalizer::apply(const CascadeGraph& g) const {
  CascadeGraph out = g;
  out.features = ((g.features.rowwise() - mean).array().rowwise() / scale.array()).matrix();
  return out;
}

std::vector<CascadeGraph> FeatureNormalizer::apply(std::span<const CascadeGraph> cascades) const {
  std::vector<CascadeGraph> out;
  out.reserve(cascades.size());
  for (const auto& g : cascades) out.push_back(apply(g));
  return out;
}

}  // namespace ccasgnn::data
