#include "ccasgnn/trainer/experiments.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "ccasgnn/baselines/linear.hpp"
#include "ccasgnn/data/transforms.hpp"

namespace ccasgnn::trainer {
using nlohmann::json;

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string cell(const std::optional<double>& v, int precision = 4) {
  if (!v) return "-";
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << *v;
  return s.str();
}

/// Left-aligned first column, right-aligned rest, two spaces between.
std::string aligned(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream out;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c > 0) out << "  ";
      out << (c == 0 ? std::left : std::right) << std::setw(static_cast<int>(width[c])) << r[c];
    }
    out << '\n';
  }
  return out.str();
}

double seconds_per_epoch(const TrainResult& r) {
  if (r.history.empty()) return 0.0;
  double total = 0.0;
  for (const auto& e : r.history) total += e.seconds;
  return total / static_cast<double>(r.history.size());
}

}  // namespace

std::string variant_label(model::Variant v) {
  switch (v) {
    case model::Variant::kFull: return "CCasGNN";
    case model::Variant::kGatOnly: return "CCasGNN-GCN";
    case model::Variant::kGcnOnly: return "CCasGNN-GAT";
    case model::Variant::kNoPe: return "CCasGNN-noPE";
  }
  return "?";
}

AblationTable run_ablation(const data::DatasetSplit& split, const model::ModelConfig& base,
                           const TrainConfig& train_config) {
  AblationTable table;
  for (model::Variant v : {model::Variant::kFull, model::Variant::kGcnOnly, model::Variant::kGatOnly,
                           model::Variant::kNoPe}) {
    AblationRow row;
    row.name = variant_label(v);
    row.variant = v;
    try {
      model::ModelConfig config = base;
      config.variant = v;
      const TrainResult r = train(split, config, train_config);
      row.train_msle = r.report.split_msle(kTrainSplit);
      row.validation_msle = r.report.split_msle(kValidationSplit);
      row.test_msle = r.report.split_msle(kTestSplit);
      row.w1 = r.report.w1;
      row.w2 = r.report.w2;
      row.epochs = static_cast<int>(r.history.size());
      row.seconds = r.report.wall_clock_seconds;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

json AblationTable::to_json() const {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"name", r.name},
                   {"variant", model::to_string(r.variant)},
                   {"train_msle", optional_json(r.train_msle)},
                   {"validation_msle", optional_json(r.validation_msle)},
                   {"test_msle", optional_json(r.test_msle)},
                   {"w1", optional_json(r.w1)},
                   {"w2", optional_json(r.w2)},
                   {"epochs", r.epochs},
                   {"seconds", r.seconds},
                   {"error", r.error}});
  }
  return {{"rows", std::move(out)}};
}

AblationTable AblationTable::from_json(const json& j) {
  AblationTable t;
  for (const json& r : j.at("rows")) {
    AblationRow row;
    row.name = r.at("name").get<std::string>();
    row.variant = model::parse_variant(r.at("variant").get<std::string>());
    row.train_msle = optional_from(r, "train_msle");
    row.validation_msle = optional_from(r, "validation_msle");
    row.test_msle = optional_from(r, "test_msle");
    row.w1 = optional_from(r, "w1");
    row.w2 = optional_from(r, "w2");
    row.epochs = r.at("epochs").get<int>();
    row.seconds = r.at("seconds").get<double>();
    row.error = r.at("error").get<std::string>();
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string AblationTable::to_text() const {
  std::vector<std::vector<std::string>> cells{{"Model", "Test MSLE", "Val MSLE", "w1", "w2", "Epochs", "Error"}};
  for (const auto& r : rows) {
    cells.push_back({r.name, cell(r.test_msle), cell(r.validation_msle), cell(r.w1), cell(r.w2),
                     std::to_string(r.epochs), r.error.empty() ? "" : r.error});
  }
  return aligned(cells);
}

SensitivityReport run_sensitivity(const data::DatasetSplit& split, const model::ModelConfig& base,
                                  const TrainConfig& train_config, const SensitivityPlan& plan) {
  SensitivityReport report;
  std::optional<SensitivityRecord> baseline;

  auto run = [&](const std::string& parameter, double value, const data::DatasetSplit& s,
                 const model::ModelConfig& config) {
    SensitivityRecord rec;
    rec.parameter = parameter;
    rec.value = value;
    try {
      const TrainResult r = train(s, config, train_config);
      rec.test_msle = r.report.split_msle(kTestSplit);
      rec.validation_msle = r.report.split_msle(kValidationSplit);
      rec.epochs = static_cast<int>(r.history.size());
      rec.seconds_per_epoch = seconds_per_epoch(r);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    return rec;
  };

  for (int dp : plan.pe_dims) {
    model::ModelConfig config = base;
    config.pe_dim = dp;
    SensitivityRecord rec = run("pe_dim", dp, split, config);
    if (dp == base.pe_dim) baseline = rec;
    report.records.push_back(std::move(rec));
  }
  for (double rate : plan.dropout_rates) {
    SensitivityRecord rec;
    if (rate == 0.0) {
      if (!baseline) baseline = run("pe_dim", base.pe_dim, split, base);
      rec = *baseline;
    } else {
      data::DatasetSplit dropped;
      dropped.split_seed = split.split_seed;
      dropped.train = data::edge_dropout(split.train, rate, plan.dropout_seed);
      dropped.validation = data::edge_dropout(split.validation, rate, plan.dropout_seed + 1);
      dropped.test = data::edge_dropout(split.test, rate, plan.dropout_seed + 2);
      rec = run("dropout_rate", rate, dropped, base);
    }
    rec.parameter = "dropout_rate";
    rec.value = rate;
    report.records.push_back(std::move(rec));
  }
  return report;
}

json SensitivityReport::to_json() const {
  json out = json::array();
  for (const auto& r : records) {
    out.push_back({{"parameter", r.parameter},
                   {"value", r.value},
                   {"test_msle", optional_json(r.test_msle)},
                   {"validation_msle", optional_json(r.validation_msle)},
                   {"epochs", r.epochs},
                   {"seconds_per_epoch", r.seconds_per_epoch},
                   {"error", r.error}});
  }
  return {{"records", std::move(out)}};
}

SensitivityReport SensitivityReport::from_json(const json& j) {
  SensitivityReport s;
  for (const json& r : j.at("records")) {
    SensitivityRecord rec;
    rec.parameter = r.at("parameter").get<std::string>();
    rec.value = r.at("value").get<double>();
    rec.test_msle = optional_from(r, "test_msle");
    rec.validation_msle = optional_from(r, "validation_msle");
    rec.epochs = r.at("epochs").get<int>();
    rec.seconds_per_epoch = r.at("seconds_per_epoch").get<double>();
    rec.error = r.at("error").get<std::string>();
    s.records.push_back(std::move(rec));
  }
  return s;
}

std::string SensitivityReport::to_text() const {
  std::vector<std::vector<std::string>> cells{{"Parameter", "Value", "Test MSLE", "Epochs", "s/epoch", "Error"}};
  for (const auto& r : records) {
    std::ostringstream v;
    v << r.value;
    cells.push_back({r.parameter, v.str(), cell(r.test_msle), std::to_string(r.epochs),
                     cell(r.seconds_per_epoch, 3), r.error});
  }
  return aligned(cells);
}

namespace {

PredictionReport baseline_report(const std::string& name, const data::DatasetSplit& split,
                                 const std::function<double(const data::CascadeGraph&)>& predict) {
  PredictionReport r;
  r.model = name;
  const std::pair<const std::vector<data::CascadeGraph>*, const std::string*> parts[] = {
      {&split.train, &kTrainSplit}, {&split.validation, &kValidationSplit}, {&split.test, &kTestSplit}};
  for (const auto& [cascades, tag] : parts) {
    for (const auto& g : *cascades) {
      r.entries.push_back({g.cascade_id, *tag, data::log_growth(g.growth_label), predict(g), std::nullopt,
                           std::nullopt});
    }
  }
  r.recompute_msle();
  return r;
}

}  // namespace

BaselineReports run_baselines(const data::DatasetSplit& split, double ridge,
                              const baselines::DeepConfig& deep_config) {
  using Clock = std::chrono::steady_clock;
  BaselineReports out;

  auto start = Clock::now();
  const auto linear = baselines::FeatureLinear::train(split.train, ridge);
  out.linear = baseline_report("Feature-Linear", split, [&](const auto& g) { return linear.predict(g); });
  out.linear.config = {{"ridge", ridge}};
  out.linear.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - start).count();

  start = Clock::now();
  const auto deep = baselines::FeatureDeep::train(split.train, deep_config);
  out.deep = baseline_report("Feature-Deep", split, [&](const auto& g) { return deep.predict(g); });
  out.deep.config = baselines::to_json(deep_config);
  out.deep.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

}  // namespace ccasgnn::trainer
