#include "ccasgnn/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "ccasgnn/errors.hpp"

namespace ccasgnn::cli {
namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected a number, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw std::invalid_argument("expected true or false, got '" + text + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number<T>(item));
  }
  return out;
}

template <typename T>
std::string format(T v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T>
std::string format_list(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format(v[i]);
  return out;
}

std::string format_path(const std::optional<fs::path>& p) { return p ? p->string() : ""; }
std::optional<fs::path> parse_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

// `field` is a generic lambda returning a reference to one member, so the
// same accessor serves both the setter and the getter.
template <typename T, typename Field>
Key number_key(Field field) {
  return {[field](RunConfig& c, const std::string& v) { field(c) = parse_number<T>(v); },
          [field](const RunConfig& c) { return format<T>(field(c)); }};
}

template <typename T, typename Field>
Key list_key(Field field) {
  return {[field](RunConfig& c, const std::string& v) { field(c) = parse_list<T>(v); },
          [field](const RunConfig& c) { return format_list<T>(field(c)); }};
}

template <typename Field>
Key path_key(Field field) {
  return {[field](RunConfig& c, const std::string& v) { field(c) = parse_path(v); },
          [field](const RunConfig& c) { return format_path(field(c)); }};
}

#define FIELD(expr) [](auto& c) -> auto& { return c.expr; }

const std::map<std::string, Key>& registry() {
  static const std::map<std::string, Key> keys = [] {
    std::map<std::string, Key> k;
    k["seed"] = {[](RunConfig& c, const std::string& v) {
                   c.seed = v.empty() ? std::nullopt : std::optional(parse_number<std::uint64_t>(v));
                 },
                 [](const RunConfig& c) { return c.seed ? format(*c.seed) : std::string(); }};
    k["corpus"] = path_key(FIELD(corpus));
    k["features"] = path_key(FIELD(features));
    k["checkpoint"] = path_key(FIELD(checkpoint));
    k["split"] = path_key(FIELD(split));
    k["window"] = number_key<double>(FIELD(window));
    k["min_retweets"] = number_key<int>(FIELD(min_retweets));
    k["feature_dim"] = number_key<int>(FIELD(feature_dim));
    k["dropout_rate"] = number_key<double>(FIELD(dropout_rate));

    k["gen.cascades"] = number_key<int>(FIELD(gen.cascade_count));
    k["gen.min_nodes"] = number_key<int>(FIELD(gen.min_nodes));
    k["gen.max_nodes"] = number_key<int>(FIELD(gen.max_nodes));
    k["gen.feature_dim"] = number_key<int>(FIELD(gen.feature_dim));
    k["gen.branching"] = number_key<double>(FIELD(gen.branching));
    k["gen.noise"] = number_key<double>(FIELD(gen.noise));
    k["gen.horizon"] = number_key<double>(FIELD(gen.horizon));
    k["gen.intercept"] = number_key<double>(FIELD(gen.rule.intercept));
    k["gen.size_coef"] = number_key<double>(FIELD(gen.rule.size));
    k["gen.depth_coef"] = number_key<double>(FIELD(gen.rule.depth));
    k["gen.influence_coef"] = number_key<double>(FIELD(gen.rule.influence));

    k["model.feature_dim"] = number_key<int>(FIELD(model.feature_dim));
    k["model.pe_dim"] = number_key<int>(FIELD(model.pe_dim));
    k["model.gnn_layers"] = number_key<int>(FIELD(model.gnn_layers));
    k["model.gat_hidden"] = list_key<int>(FIELD(model.gat_hidden));
    k["model.gcn_hidden"] = list_key<int>(FIELD(model.gcn_hidden));
    k["model.heads"] = number_key<int>(FIELD(model.heads));
    k["model.head_dim"] = number_key<int>(FIELD(model.head_dim));
    k["model.mlp_hidden"] = list_key<int>(FIELD(model.mlp_hidden));
    k["model.leaky_slope"] = number_key<double>(FIELD(model.leaky_slope));
    k["model.gat_activation"] = {
        [](RunConfig& c, const std::string& v) { c.model.gat_activation = model::parse_activation(v); },
        [](const RunConfig& c) { return std::string(model::to_string(c.model.gat_activation)); }};
    k["model.gcn_activation"] = {
        [](RunConfig& c, const std::string& v) { c.model.gcn_activation = model::parse_activation(v); },
        [](const RunConfig& c) { return std::string(model::to_string(c.model.gcn_activation)); }};
    k["model.variant"] = {[](RunConfig& c, const std::string& v) { c.model.variant = model::parse_variant(v); },
                          [](const RunConfig& c) { return std::string(model::to_string(c.model.variant)); }};

    k["train.learning_rate"] = number_key<double>(FIELD(train.learning_rate));
    k["train.epochs"] = number_key<int>(FIELD(train.epochs));
    k["train.batch_size"] = number_key<int>(FIELD(train.batch_size));
    k["train.patience"] = number_key<int>(FIELD(train.patience));
    k["train.beta1"] = number_key<double>(FIELD(train.beta1));
    k["train.beta2"] = number_key<double>(FIELD(train.beta2));
    k["train.epsilon"] = number_key<double>(FIELD(train.epsilon));
    k["train.clip_norm"] = number_key<double>(FIELD(train.clip_norm));
    k["train.max_steps"] = number_key<std::int64_t>(FIELD(train.max_steps));
    k["train.standardize"] = {[](RunConfig& c, const std::string& v) { c.train.standardize = parse_bool(v); },
                              [](const RunConfig& c) { return std::string(c.train.standardize ? "true" : "false"); }};

    k["baseline.ridge"] = number_key<double>(FIELD(ridge));
    k["deep.hidden"] = list_key<int>(FIELD(deep.hidden));
    k["deep.learning_rate"] = number_key<double>(FIELD(deep.learning_rate));
    k["deep.epochs"] = number_key<int>(FIELD(deep.epochs));
    k["deep.batch_size"] = number_key<int>(FIELD(deep.batch_size));

    k["sensitivity.pe_dims"] = list_key<int>(FIELD(sensitivity.pe_dims));
    k["sensitivity.dropout_rates"] = list_key<double>(FIELD(sensitivity.dropout_rates));
    return k;
  }();
  return keys;
}

#undef FIELD

}  // namespace

std::vector<std::string> RunConfig::issues() const {
  std::vector<std::string> out;
  if (!(window > 0.0)) out.push_back("window must be > 0");
  if (min_retweets < 0) out.push_back("min_retweets must be >= 0");
  if (feature_dim < 0) out.push_back("feature_dim must be >= 0");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) out.push_back("dropout_rate must be in [0, 1)");
  if (!(ridge >= 0.0)) out.push_back("baseline.ridge must be >= 0");
  for (const auto& s : gen.issues()) out.push_back("gen: " + s);
  for (const auto& s : model.issues()) out.push_back("model: " + s);
  for (const auto& s : train.issues()) out.push_back("train: " + s);
  for (const auto& s : deep.issues()) out.push_back(s);
  for (int dp : sensitivity.pe_dims) {
    if (dp <= 0 || dp % 2 != 0) out.push_back("sensitivity.pe_dims entries must be positive and even");
  }
  for (double r : sensitivity.dropout_rates) {
    if (!(r >= 0.0 && r < 1.0)) out.push_back("sensitivity.dropout_rates entries must be in [0, 1)");
  }
  if (!inject_fault.empty() && !numcore::op_from_name(inject_fault)) {
    out.push_back("inject-fault: unknown op '" + inject_fault + "'");
  }
  return out;
}

void RunConfig::propagate_seed() {
  if (!seed) return;
  gen.seed = *seed;
  train.seed = *seed;
  deep.seed = *seed;
  sensitivity.dropout_seed = *seed;
}

std::vector<Setting> parse_config_text(const std::string& text, const std::string& source,
                                       std::vector<std::string>& issues) {
  std::vector<Setting> out;
  std::stringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back(source + ":" + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

std::vector<Setting> read_config_file(const fs::path& path, std::vector<std::string>& issues) {
  std::ifstream in(path);
  if (!in) {
    issues.push_back("cannot read config file " + path.string());
    return {};
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string(), issues);
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   std::vector<std::string>& issues) {
  if (key == "gen.window" || key == "gen.min_retweets" || key == "gen.seed") {
    issues.push_back(key + ": use " + key.substr(4) + " instead");
    return;
  }
  if (key == "inject_fault") {
    config.inject_fault = value;
    return;
  }
  const auto& keys = registry();
  auto it = keys.find(key);
  if (it == keys.end()) {
    issues.push_back(key + ": unknown setting");
    return;
  }
  try {
    it->second.set(config, value);
  } catch (const ConfigError& e) {
    for (const auto& s : e.issues()) issues.push_back(key + ": " + s);
  } catch (const std::exception& e) {
    issues.push_back(key + ": " + e.what());
  }
}

RunConfig resolve_config(const std::optional<fs::path>& file, const std::vector<Setting>& overrides) {
  RunConfig config;
  std::vector<std::string> issues;
  if (file) {
    for (const auto& [k, v] : read_config_file(*file, issues)) apply_setting(config, k, v, issues);
  }
  for (const auto& [k, v] : overrides) apply_setting(config, k, v, issues);
  // The generator and the loader share one observation window and filter.
  config.gen.window = config.window;
  config.gen.min_retweets = config.min_retweets;
  config.propagate_seed();
  for (auto& s : config.issues()) issues.push_back(std::move(s));
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return config;
}

std::map<std::string, std::string> snapshot(const RunConfig& config) {
  std::map<std::string, std::string> out;
  for (const auto& [name, key] : registry()) out[name] = key.get(config);
  if (!config.inject_fault.empty()) out["inject_fault"] = config.inject_fault;
  return out;
}

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const auto& [name, key] : registry()) out.push_back(name);
  return out;
}

}  // namespace ccasgnn::cli
