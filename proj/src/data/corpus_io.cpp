#include "ccasgnn/data/corpus_io.hpp"

#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ccasgnn/errors.hpp"

namespace ccasgnn::data {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

CascadeRecord parse_record(const json& j) {
  CascadeRecord rec;
  rec.id = j.at("id").get<std::string>();
  for (const json& e : j.at("events")) {
    Event ev;
    ev.user = e.at("user").get<std::string>();
    ev.time = e.at("time").get<double>();
    const json& parent = e.at("parent");
    if (!parent.is_null()) ev.parent = parent.get<std::string>();
    rec.events.push_back(std::move(ev));
  }
  return rec;
}

void check_record(const CascadeRecord& rec, const std::string& where) {
  if (rec.events.empty()) throw ValidationError(where + "cascade " + rec.id + " has no events");
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t k = 0; k < rec.events.size(); ++k) {
    const Event& ev = rec.events[k];
    if (k == 0 && ev.parent) throw ValidationError(where + "first event must have parent null");
    if (k > 0) {
      if (!ev.parent) throw ValidationError(where + "only the first event may have parent null");
      if (!seen.contains(*ev.parent)) {
        throw ValidationError(where + "parent " + *ev.parent + " of " + ev.user +
                              " does not precede it");
      }
      if (ev.time < rec.events[k - 1].time) {
        throw ValidationError(where + "events not sorted by time at " + ev.user);
      }
    }
    if (!seen.emplace(ev.user, k).second) {
      throw ValidationError(where + "duplicate user " + ev.user);
    }
  }
}

}  // namespace

std::vector<CascadeRecord> read_records(const fs::path& path) {
  auto in = open_input(path);
  std::vector<CascadeRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    CascadeRecord rec;
    try {
      rec = parse_record(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    check_record(rec, path.string() + ":" + std::to_string(line_no) + ": ");
    records.push_back(std::move(rec));
  }
  return records;
}

void write_records(const fs::path& path, std::span<const CascadeRecord> records) {
  auto out = open_output(path);
  for (const CascadeRecord& rec : records) {
    json events = json::array();
    for (const Event& ev : rec.events) {
      json e;
      e["user"] = ev.user;
      e["time"] = ev.time;
      e["parent"] = ev.parent ? json(*ev.parent) : json(nullptr);
      events.push_back(std::move(e));
    }
    json j;
    j["id"] = rec.id;
    j["events"] = std::move(events);
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

FeatureTable read_feature_table(const fs::path& path) {
  auto in = open_input(path);
  FeatureTable table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      const json j = json::parse(line);
      auto values = j.at("features").get<std::vector<double>>();
      if (table.empty()) width = values.size();
      if (values.size() != width) {
        throw ParseError(path.string(), line_no,
                         "feature width " + std::to_string(values.size()) + ", expected " +
                             std::to_string(width));
      }
      table[j.at("user").get<std::string>()] = std::move(values);
    } catch (const json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return table;
}

void write_feature_table(const fs::path& path, const FeatureTable& table) {
  auto out = open_output(path);
  for (const auto& [user, values] : table) {
    json j;
    j["user"] = user;
    j["features"] = values;
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::optional<CascadeGraph> observe(const CascadeRecord& record, double window,
                                    std::size_t min_retweets, const FeatureTable& features,
                                    int feature_dim) {
  const std::size_t total = record.events.size();
  if (total == 0 || total - 1 < min_retweets) return std::nullopt;

  // Root always survives; events are time-sorted so the window is a prefix.
  std::size_t observed = 1;
  while (observed < total && record.events[observed].time <= window) ++observed;
  if (observed < 2) return std::nullopt;

  CascadeGraph g;
  g.cascade_id = record.id;
  g.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(observed), feature_dim);
  std::unordered_map<std::string, int> index;
  for (std::size_t k = 0; k < observed; ++k) {
    const Event& ev = record.events[k];
    const int i = static_cast<int>(k);
    index.emplace(ev.user, i);
    g.node_ids.push_back(ev.user);
    g.positions.push_back(i);
    g.activation_times.push_back(ev.time);
    if (ev.parent) g.edges.push_back({index.at(*ev.parent), i});
    if (auto it = features.find(ev.user); it != features.end()) {
      if (static_cast<int>(it->second.size()) != feature_dim) {
        throw ValidationError("features of " + ev.user + " have the wrong width");
      }
      g.features.row(i) = Eigen::Map<const Eigen::RowVectorXd>(it->second.data(), feature_dim);
    }
  }
  g.growth_label = static_cast<std::int64_t>(total - observed);
  return g;
}

std::vector<CascadeGraph> load_corpus(const fs::path& path, const CorpusOptions& options) {
  FeatureTable table;
  int width = options.feature_dim;
  if (options.features) {
    table = read_feature_table(*options.features);
    if (!table.empty()) width = static_cast<int>(table.begin()->second.size());
  }
  if (width <= 0) throw DataError("feature dimension unknown: give a feature sidecar or feature_dim");

  std::vector<CascadeGraph> corpus;
  for (const CascadeRecord& rec : read_records(path)) {
    if (auto g = observe(rec, options.window, options.min_retweets, table, width)) {
      corpus.push_back(std::move(*g));
    }
  }
  return corpus;
}

CascadeRecord to_record(const CascadeGraph& g, double window, double horizon) {
  g.validate();
  const int n = g.size();
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  for (const Edge& e : g.edges) {
    if (parent[static_cast<std::size_t>(e.dst)] != -1) {
      throw ValidationError("cascade " + g.cascade_id + " is not tree-shaped");
    }
    parent[static_cast<std::size_t>(e.dst)] = e.src;
  }
  std::vector<int> by_position(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) by_position[static_cast<std::size_t>(g.positions[static_cast<std::size_t>(i)])] = i;

  CascadeRecord rec;
  rec.id = g.cascade_id;
  for (int p = 0; p < n; ++p) {
    const int i = by_position[static_cast<std::size_t>(p)];
    const auto iu = static_cast<std::size_t>(i);
    if (g.activation_times[iu] > window && p > 0) {
      throw ValidationError("cascade " + g.cascade_id + " has an observed event after the window");
    }
    Event ev{g.node_ids[iu], g.activation_times[iu], std::nullopt};
    if (p > 0) {
      if (parent[iu] == -1 || g.positions[static_cast<std::size_t>(parent[iu])] >= p) {
        throw ValidationError("cascade " + g.cascade_id + ": node " + g.node_ids[iu] +
                              " lacks an earlier parent");
      }
      ev.parent = g.node_ids[static_cast<std::size_t>(parent[iu])];
    }
    rec.events.push_back(std::move(ev));
  }
  const std::string& root_user = g.node_ids[static_cast<std::size_t>(by_position[0])];
  const auto late = static_cast<double>(g.growth_label);
  for (std::int64_t k = 0; k < g.growth_label; ++k) {
    const double t = window + (horizon - window) * (static_cast<double>(k) + 1.0) / (late + 1.0);
    rec.events.push_back({g.cascade_id + "/late" + std::to_string(k), t, root_user});
  }
  return rec;
}

void save_corpus(const fs::path& path, std::span<const CascadeGraph> corpus, double window,
                 double horizon, const std::optional<fs::path>& features_path) {
  if (!(horizon > window)) throw std::invalid_argument("save_corpus: horizon must exceed window");
  std::vector<CascadeRecord> records;
  records.reserve(corpus.size());
  FeatureTable table;
  for (const CascadeGraph& g : corpus) {
    records.push_back(to_record(g, window, horizon));
    for (int i = 0; i < g.size(); ++i) {
      const Eigen::RowVectorXd row = g.features.row(i);
      table[g.node_ids[static_cast<std::size_t>(i)]] = std::vector<double>(row.data(), row.data() + row.size());
    }
  }
  write_records(path, records);
  if (features_path) write_feature_table(*features_path, table);
}

fs::path default_features_path(const fs::path& corpus_path) {
  fs::path p = corpus_path;
  p.replace_extension(".features.jsonl");
  return p;
}

}  // namespace ccasgnn::data
