#include "ccasgnn/data/cascade.hpp"

#include <cmath>
#include <queue>

#include "ccasgnn/errors.hpp"

namespace ccasgnn::data {

int CascadeGraph::root() const {
  for (int i = 0; i < size(); ++i) {
    if (positions[static_cast<std::size_t>(i)] == 0) return i;
  }
  throw ValidationError("cascade " + cascade_id + ": no node at position 0");
}

void CascadeGraph::validate() const {
  const auto n = node_ids.size();
  const std::string where = "cascade " + cascade_id + ": ";
  if (n < 2) throw ValidationError(where + "needs at least 2 observed nodes");
  if (positions.size() != n) throw ValidationError(where + "positions length differs from node count");
  if (activation_times.size() != n) {
    throw ValidationError(where + "activation_times length differs from node count");
  }
  if (static_cast<std::size_t>(features.rows()) != n) {
    throw ValidationError(where + "feature rows differ from node count");
  }
  std::vector<int> by_position(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const int p = positions[i];
    if (p < 0 || static_cast<std::size_t>(p) >= n || by_position[static_cast<std::size_t>(p)] != -1) {
      throw ValidationError(where + "positions are not a permutation of 0..n-1");
    }
    by_position[static_cast<std::size_t>(p)] = static_cast<int>(i);
  }
  for (std::size_t p = 1; p < n; ++p) {
    if (activation_times[static_cast<std::size_t>(by_position[p])] <
        activation_times[static_cast<std::size_t>(by_position[p - 1])]) {
      throw ValidationError(where + "activation times decrease along positions");
    }
  }
  for (const Edge& e : edges) {
    if (e.src < 0 || e.dst < 0 || e.src >= static_cast<int>(n) || e.dst >= static_cast<int>(n)) {
      throw ValidationError(where + "edge endpoint out of range");
    }
    if (e.src == e.dst) throw ValidationError(where + "self-loop edge");
  }
  if (growth_label < 0) throw ValidationError(where + "negative growth label");
  if (!features.allFinite()) throw ValidationError(where + "non-finite feature value");
}

bool operator==(const CascadeGraph& a, const CascadeGraph& b) {
  return a.cascade_id == b.cascade_id && a.node_ids == b.node_ids && a.edges == b.edges &&
         a.positions == b.positions && a.activation_times == b.activation_times &&
         a.growth_label == b.growth_label && a.features.rows() == b.features.rows() &&
         a.features.cols() == b.features.cols() && a.features == b.features;
}

int cascade_depth(const CascadeGraph& g) {
  const int n = g.size();
  std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
  for (const Edge& e : g.edges) children[static_cast<std::size_t>(e.src)].push_back(e.dst);
  std::vector<int> depth(static_cast<std::size_t>(n), -1);
  std::queue<int> frontier;
  const int r = g.root();
  depth[static_cast<std::size_t>(r)] = 0;
  frontier.push(r);
  int deepest = 0;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int c : children[static_cast<std::size_t>(v)]) {
      if (depth[static_cast<std::size_t>(c)] != -1) continue;
      depth[static_cast<std::size_t>(c)] = depth[static_cast<std::size_t>(v)] + 1;
      deepest = std::max(deepest, depth[static_cast<std::size_t>(c)]);
      frontier.push(c);
    }
  }
  return deepest;
}

double log_growth(std::int64_t growth) {
  if (growth < 0) throw ValidationError("negative growth value");
  return std::log2(static_cast<double>(growth) + 1.0);
}

}  // namespace ccasgnn::data
