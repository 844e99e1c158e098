#include "ccasgnn/data/split.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ccasgnn/errors.hpp"

namespace ccasgnn::data {
using nlohmann::json;

DatasetSplit split_corpus(std::span<const CascadeGraph> corpus, std::uint64_t seed) {
  const std::size_t n = corpus.size();
  if (n < 10) {
    throw DataError("split_corpus: need at least 10 cascades, got " + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  // Nearest-integer sizes (halves round up) keep every part within one
  // cascade of its share; flooring both would push up to two onto test.
  const std::size_t n_train = (n * 7 + 5) / 10;
  const std::size_t n_val = (n + 5) / 10;
  DatasetSplit split;
  split.split_seed = seed;
  for (std::size_t k = 0; k < n; ++k) {
    const CascadeGraph& g = corpus[order[k]];
    if (k < n_train) {
      split.train.push_back(g);
    } else if (k < n_train + n_val) {
      split.validation.push_back(g);
    } else {
      split.test.push_back(g);
    }
  }
  return split;
}

SplitManifest manifest_of(const DatasetSplit& split) {
  SplitManifest m;
  m.seed = split.split_seed;
  for (const auto& g : split.train) m.train.push_back(g.cascade_id);
  for (const auto& g : split.validation) m.validation.push_back(g.cascade_id);
  for (const auto& g : split.test) m.test.push_back(g.cascade_id);
  return m;
}

void write_split_manifest(const std::filesystem::path& path, const SplitManifest& manifest) {
  json j;
  j["seed"] = manifest.seed;
  j["train"] = manifest.train;
  j["validation"] = manifest.validation;
  j["test"] = manifest.test;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

SplitManifest read_split_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    const json j = json::parse(in);
    SplitManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.train = j.at("train").get<std::vector<std::string>>();
    m.validation = j.at("validation").get<std::vector<std::string>>();
    m.test = j.at("test").get<std::vector<std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 1, e.what());
  }
}

DatasetSplit apply_split_manifest(std::span<const CascadeGraph> corpus, const SplitManifest& manifest) {
  std::unordered_map<std::string, const CascadeGraph*> by_id;
  for (const auto& g : corpus) by_id.emplace(g.cascade_id, &g);
  auto pick = [&](const std::vector<std::string>& ids) {
    std::vector<CascadeGraph> out;
    for (const auto& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw DataError("split manifest names unknown cascade " + id);
      out.push_back(*it->second);
    }
    return out;
  };
  DatasetSplit split;
  split.split_seed = manifest.seed;
  split.train = pick(manifest.train);
  split.validation = pick(manifest.validation);
  split.test = pick(manifest.test);
  return split;
}

}  // namespace ccasgnn::data
