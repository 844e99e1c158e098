#include "ccasgnn/trainer/report.hpp"

#include <fstream>

#include "ccasgnn/errors.hpp"

namespace ccasgnn::trainer {
using nlohmann::json;

double msle(std::span<const double> predicted_log, std::span<const double> true_log) {
  if (predicted_log.size() != true_log.size()) throw ContractViolation("msle: length mismatch");
  if (predicted_log.empty()) throw ContractViolation("msle: no predictions");
  double total = 0.0;
  for (std::size_t i = 0; i < predicted_log.size(); ++i) {
    const double d = predicted_log[i] - true_log[i];
    total += d * d;
  }
  return total / static_cast<double>(predicted_log.size());
}

void PredictionReport::recompute_msle() {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_split;
  for (const ReportEntry& e : entries) {
    auto& [pred, truth] = by_split[e.split];
    pred.push_back(e.pred_log);
    truth.push_back(e.true_log);
  }
  msle.clear();
  for (const auto& [split, values] : by_split) msle[split] = trainer::msle(values.first, values.second);
}

std::optional<double> PredictionReport::split_msle(const std::string& split) const {
  if (auto it = msle.find(split); it != msle.end()) return it->second;
  return std::nullopt;
}

void PredictionReport::merge(const PredictionReport& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
  wall_clock_seconds += other.wall_clock_seconds;
  recompute_msle();
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

json to_json(const PredictionReport& r) {
  json entries = json::array();
  for (const ReportEntry& e : r.entries) {
    entries.push_back({{"id", e.cascade_id},
                       {"split", e.split},
                       {"true_log", e.true_log},
                       {"pred_log", e.pred_log},
                       {"pred_gat", optional_json(e.pred_gat)},
                       {"pred_att", optional_json(e.pred_att)}});
  }
  return {{"model", r.model},
          {"entries", std::move(entries)},
          {"msle", r.msle},
          {"w1", optional_json(r.w1)},
          {"w2", optional_json(r.w2)},
          {"config", r.config},
          {"wall_clock_seconds", r.wall_clock_seconds}};
}

PredictionReport report_from_json(const json& j) {
  try {
    PredictionReport r;
    r.model = j.at("model").get<std::string>();
    for (const json& e : j.at("entries")) {
      r.entries.push_back({e.at("id").get<std::string>(), e.at("split").get<std::string>(),
                           e.at("true_log").get<double>(), e.at("pred_log").get<double>(),
                           optional_from(e, "pred_gat"), optional_from(e, "pred_att")});
    }
    r.msle = j.at("msle").get<std::map<std::string, double>>();
    r.w1 = optional_from(j, "w1");
    r.w2 = optional_from(j, "w2");
    r.config = j.at("config");
    r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed prediction report: ") + e.what());
  }
}

void save_report(const std::filesystem::path& path, const PredictionReport& r) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(r).dump(2) << '\n';
}

PredictionReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return report_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

}  // namespace ccasgnn::trainer
