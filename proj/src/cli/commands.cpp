#include "ccasgnn/cli/commands.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "ccasgnn/data/corpus_io.hpp"
#include "ccasgnn/data/split.hpp"
#include "ccasgnn/data/transforms.hpp"
#include "ccasgnn/errors.hpp"
#include "ccasgnn/model/checkpoint.hpp"
#include "ccasgnn/model/gradcheck.hpp"
#include "ccasgnn/trainer/experiments.hpp"

namespace ccasgnn::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string fixed(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

std::string msle_cell(const trainer::PredictionReport& r, const std::string& split) {
  auto v = r.split_msle(split);
  return v ? fixed(*v) : "-";
}

fs::path required_corpus(const RunConfig& c, const std::string& command) {
  if (!c.corpus) throw ConfigError({"corpus: required by " + command + " (--corpus)"});
  return *c.corpus;
}

std::vector<data::CascadeGraph> load(const RunConfig& c, const std::string& command) {
  data::CorpusOptions options;
  const fs::path corpus = required_corpus(c, command);
  if (!fs::exists(corpus)) throw DataError("cannot open " + corpus.string());
  options.window = c.window;
  options.min_retweets = static_cast<std::size_t>(c.min_retweets);
  options.feature_dim = c.feature_dim;
  if (c.features) {
    options.features = *c.features;
  } else if (fs::path sidecar = data::default_features_path(corpus); fs::exists(sidecar)) {
    options.features = sidecar;
  }
  auto cascades = data::load_corpus(corpus, options);
  if (cascades.empty()) throw DataError(corpus.string() + ": no cascade survives the filter");
  if (c.dropout_rate > 0.0) cascades = data::edge_dropout(cascades, c.dropout_rate, *c.seed);
  return cascades;
}

data::DatasetSplit load_split(RunConfig& c, const std::string& command) {
  const auto corpus = load(c, command);
  c.model.feature_dim = corpus.front().feature_dim();
  if (c.split) return data::apply_split_manifest(corpus, data::read_split_manifest(*c.split));
  return data::split_corpus(corpus, *c.seed);
}

Outputs cmd_gen_data(CommandContext& ctx) {
  const auto corpus = data::generate_synthetic(ctx.config.gen);
  const fs::path corpus_path = ctx.out_dir / "corpus.jsonl";
  const fs::path features_path = data::default_features_path(corpus_path);
  data::save_corpus(corpus_path, corpus, ctx.config.window, ctx.config.gen.horizon, features_path);
  ctx.out << summary_table("synthetic", summarize(corpus));
  return {{"corpus", corpus_path.string()}, {"features", features_path.string()}};
}

Outputs cmd_train(CommandContext& ctx) {
  auto& c = ctx.config;
  const data::DatasetSplit split = load_split(c, "train");
  ctx.out << "train " << split.train.size() << " / validation " << split.validation.size() << " / test "
          << split.test.size() << " cascades, variant " << model::to_string(c.model.variant) << '\n';
  const auto result = trainer::train(split, c.model, c.train, [&](const trainer::EpochStats& s) {
    ctx.out << "epoch " << s.epoch << "  loss " << fixed(s.train_loss) << "  val MSLE "
            << fixed(s.validation_msle) << '\n';
  });

  const fs::path checkpoint = ctx.out_dir / "checkpoint.json";
  const fs::path report = ctx.out_dir / "report.json";
  const fs::path split_path = ctx.out_dir / "split.json";
  const fs::path history = ctx.out_dir / "history.json";
  model::save_checkpoint(checkpoint, result.model);
  trainer::save_report(report, result.report);
  data::write_split_manifest(split_path, data::manifest_of(split));
  json h = json::array();
  for (const auto& e : result.history) {
    h.push_back({{"epoch", e.epoch},
                 {"steps", e.steps},
                 {"train_loss", e.train_loss},
                 {"train_fusion_loss", e.train_fusion_loss},
                 {"validation_msle", std::isfinite(e.validation_msle) ? json(e.validation_msle) : json(nullptr)},
                 {"seconds", e.seconds}});
  }
  write_json(history, {{"best_epoch", result.best_epoch},
                       {"steps", result.steps},
                       {"stopped_early", result.stopped_early},
                       {"epochs", std::move(h)}});
  ctx.out << "best epoch " << result.best_epoch << ", test MSLE " << msle_cell(result.report, trainer::kTestSplit)
          << ", w1 " << fixed(*result.report.w1) << ", w2 " << fixed(*result.report.w2) << '\n';
  return {{"checkpoint", checkpoint.string()},
          {"report", report.string()},
          {"split", split_path.string()},
          {"history", history.string()}};
}

Outputs cmd_eval(CommandContext& ctx) {
  auto& c = ctx.config;
  if (!c.checkpoint) throw ConfigError({"checkpoint: required by eval (--checkpoint)"});
  const model::Model m = model::load_checkpoint(*c.checkpoint);
  const auto corpus = load(c, "eval");
  if (corpus.front().feature_dim() != m.config.feature_dim) {
    throw DataError("corpus has " + std::to_string(corpus.front().feature_dim()) +
                    " features, checkpoint expects " + std::to_string(m.config.feature_dim));
  }
  trainer::PredictionReport r;
  if (c.split) {
    r = trainer::evaluate(m, data::apply_split_manifest(corpus, data::read_split_manifest(*c.split)));
  } else {
    r = trainer::evaluate(m, corpus, "all");
  }
  const fs::path report = ctx.out_dir / "report.json";
  trainer::save_report(report, r);
  for (const auto& [split, value] : r.msle) ctx.out << split << " MSLE " << fixed(value, 6) << '\n';
  return {{"report", report.string()}};
}

Outputs cmd_ablate(CommandContext& ctx) {
  auto& c = ctx.config;
  const data::DatasetSplit split = load_split(c, "ablate");
  const auto table = trainer::run_ablation(split, c.model, c.train);
  const fs::path json_path = ctx.out_dir / "ablation.json";
  const fs::path text_path = ctx.out_dir / "ablation.txt";
  write_json(json_path, table.to_json());
  write_text(text_path, table.to_text());
  ctx.out << table.to_text();
  return {{"table", json_path.string()}, {"text", text_path.string()}};
}

Outputs cmd_sensitivity(CommandContext& ctx) {
  auto& c = ctx.config;
  const data::DatasetSplit split = load_split(c, "sensitivity");
  const auto report = trainer::run_sensitivity(split, c.model, c.train, c.sensitivity);
  const fs::path json_path = ctx.out_dir / "sensitivity.json";
  const fs::path text_path = ctx.out_dir / "sensitivity.txt";
  write_json(json_path, report.to_json());
  write_text(text_path, report.to_text());
  ctx.out << report.to_text();
  return {{"records", json_path.string()}, {"text", text_path.string()}};
}

Outputs cmd_baseline(CommandContext& ctx) {
  auto& c = ctx.config;
  const data::DatasetSplit split = load_split(c, "baseline");
  const auto reports = trainer::run_baselines(split, c.ridge, c.deep);
  const fs::path linear = ctx.out_dir / "baseline_linear.json";
  const fs::path deep = ctx.out_dir / "baseline_deep.json";
  const fs::path text = ctx.out_dir / "baselines.txt";
  trainer::save_report(linear, reports.linear);
  trainer::save_report(deep, reports.deep);
  std::ostringstream table;
  table << std::left << std::setw(16) << "Model" << std::right << std::setw(12) << "Train MSLE" << std::setw(12)
        << "Val MSLE" << std::setw(12) << "Test MSLE" << '\n';
  for (const auto* r : {&reports.linear, &reports.deep}) {
    table << std::left << std::setw(16) << r->model << std::right << std::setw(12)
          << msle_cell(*r, trainer::kTrainSplit) << std::setw(12) << msle_cell(*r, trainer::kValidationSplit)
          << std::setw(12) << msle_cell(*r, trainer::kTestSplit) << '\n';
  }
  write_text(text, table.str());
  ctx.out << table.str();
  return {{"linear", linear.string()}, {"deep", deep.string()}, {"text", text.string()}};
}

struct GradcheckFailed : NumericalError {
  using NumericalError::NumericalError;
};

Outputs cmd_gradcheck(CommandContext& ctx) {
  const auto& c = ctx.config;
  model::GradcheckOptions options;
  if (!c.inject_fault.empty()) options.corrupt = numcore::op_from_name(c.inject_fault);
  const auto cascade = model::gradcheck_cascade(c.model.feature_dim, *c.seed);
  const auto params = model::init_params(c.model, *c.seed);
  const auto report = model::gradcheck(cascade, params, c.model, options);

  json groups = json::array();
  for (const auto& g : report.groups) {
    ctx.out << std::left << std::setw(18) << g.name << " worst rel " << std::scientific << std::setprecision(3)
            << g.worst_relative << "  worst abs " << g.worst_absolute << std::defaultfloat << "  "
            << (g.passed ? "ok" : "FAIL") << '\n';
    groups.push_back({{"name", g.name},
                      {"worst_relative", g.worst_relative},
                      {"worst_absolute", g.worst_absolute},
                      {"passed", g.passed}});
  }
  const fs::path path = ctx.out_dir / "gradcheck.json";
  write_json(path, {{"passed", report.passed},
                    {"worst_relative", report.worst_relative},
                    {"seconds", report.seconds},
                    {"groups", std::move(groups)}});
  ctx.out << (report.passed ? "PASS" : "FAIL") << "  max rel err " << std::scientific << std::setprecision(3)
          << report.worst_relative << std::defaultfloat << "  (" << fixed(report.seconds, 1) << " s)\n";
  if (!report.passed) {
    std::string names;
    for (const auto& n : report.failures()) names += (names.empty() ? "" : ", ") + n;
    throw GradcheckFailed("gradient check failed for: " + names);
  }
  return {{"report", path.string()}};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"gen-data", "train",    "eval",     "ablate",
                                              "sensitivity", "baseline", "gradcheck"};
  return names;
}

int dispatch(const std::string& command, CommandContext& ctx) {
  if (!ctx.config.seed) {
    ctx.config.seed = std::random_device{}();
    ctx.config.propagate_seed();
  }
  fs::create_directories(ctx.out_dir);

  RunManifest manifest;
  manifest.command = command;
  manifest.config_path = ctx.config_path;
  manifest.resolved = snapshot(ctx.config);
  manifest.seed = *ctx.config.seed;
  manifest.started = utc_timestamp();
  manifest.replayed_from = ctx.replayed_from;
  const fs::path manifest_path = ctx.out_dir / kManifestFile;

  try {
    Outputs outputs;
    if (command == "gen-data") outputs = cmd_gen_data(ctx);
    else if (command == "train") outputs = cmd_train(ctx);
    else if (command == "eval") outputs = cmd_eval(ctx);
    else if (command == "ablate") outputs = cmd_ablate(ctx);
    else if (command == "sensitivity") outputs = cmd_sensitivity(ctx);
    else if (command == "baseline") outputs = cmd_baseline(ctx);
    else if (command == "gradcheck") outputs = cmd_gradcheck(ctx);
    else throw ConfigError({"unknown command " + command});
    manifest.outputs = std::move(outputs);
  } catch (const std::exception& e) {
    manifest.finished = utc_timestamp();
    manifest.status = "failed";
    manifest.error = e.what();
    write_manifest(manifest_path, manifest);
    throw;
  }
  manifest.finished = utc_timestamp();
  write_manifest(manifest_path, manifest);
  return kExitOk;
}

int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "configuration error:\n";
    for (const auto& issue : e.issues()) err << "  " << issue << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const DimensionError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int replay(const fs::path& manifest_path, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  try {
    const RunManifest m = read_manifest(manifest_path);
    std::vector<Setting> settings(m.resolved.begin(), m.resolved.end());
    CommandContext ctx{resolve_config(std::nullopt, settings), m.config_path, out_dir, out, err, manifest_path};
    return dispatch(m.command, ctx);
  } catch (...) {
    return exit_code_for_current_exception(err);
  }
}

CorpusSummary summarize(std::span<const data::CascadeGraph> corpus) {
  CorpusSummary s;
  s.cascades = corpus.size();
  if (corpus.empty()) return s;
  for (const auto& g : corpus) {
    s.avg_nodes += g.size();
    s.avg_edges += static_cast<double>(g.edges.size());
    s.avg_growth += static_cast<double>(g.growth_label);
  }
  const auto n = static_cast<double>(corpus.size());
  s.avg_nodes /= n;
  s.avg_edges /= n;
  s.avg_growth /= n;
  return s;
}

std::string summary_table(const std::string& name, const CorpusSummary& s) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "Dataset" << std::right << std::setw(10) << "Cascades" << std::setw(12)
      << "Avg. nodes" << std::setw(12) << "Avg. edges" << std::setw(13) << "Avg. growth" << '\n';
  out << std::left << std::setw(12) << name << std::right << std::setw(10) << s.cascades << std::setw(12)
      << fixed(s.avg_nodes, 2) << std::setw(12) << fixed(s.avg_edges, 2) << std::setw(13) << fixed(s.avg_growth, 2)
      << '\n';
  return out.str();
}

}  // namespace ccasgnn::cli
