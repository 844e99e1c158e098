#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ccasgnn/cli/app.hpp"
#include "ccasgnn/cli/commands.hpp"
#include "ccasgnn/cli/config.hpp"
#include "ccasgnn/cli/manifest.hpp"
#include "ccasgnn/data/corpus_io.hpp"
#include "ccasgnn/errors.hpp"
#include "ccasgnn/trainer/report.hpp"
#include "compare_outputs.hpp"
#include "test_util.hpp"

namespace {

using namespace ccasgnn;
using namespace ccasgnn::cli;
using nlohmann::json;
namespace fs = std::filesystem;

struct CommandResult {
  int code = 0;
  std::string out;
  std::string err;
};

CommandResult ccasgnn_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kSmallModel =
    "# shrunk so a test run takes well under a second\n"
    "model.pe_dim = 8\n"
    "model.gat_hidden = 8,8\n"
    "model.gcn_hidden = 8,8\n"
    "model.heads = 2\n"
    "model.head_dim = 4\n"
    "model.mlp_hidden = 8\n"
    "train.epochs = 2\n"
    "deep.epochs = 5\n"
    "gen.cascades = 60\n"
    "gen.max_nodes = 12\n"
    "gen.feature_dim = 4\n";

class CliRun : public ::testing::Test {
 protected:
  void SetUp() override {
    test_support::write_file(dir / "small.cfg", kSmallModel);
    const auto r = command({"gen-data", "--out", (dir / "gen").string(), "--seed", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  CommandResult command(std::vector<std::string> args) {
    args.insert(args.begin() + 1, {"--config", (dir / "small.cfg").string()});
    return ccasgnn_run(std::move(args));
  }

  std::string corpus() const { return (dir / "gen" / "corpus.jsonl").string(); }

  test_support::TempDir dir;
};

json read_json(const fs::path& p) { return json::parse(test_support::read_file(p)); }

// ---------------------------------------------------------------- config

TEST(Config, OverridesBeatFileBeatDefaults) {
  test_support::TempDir dir;
  test_support::write_file(dir / "c.cfg", "seed = 3\nmodel.pe_dim = 8\ntrain.epochs = 7\n");
  const auto c = resolve_config(dir / "c.cfg", {{"model.pe_dim", "32"}});
  EXPECT_EQ(c.model.pe_dim, 32);
  EXPECT_EQ(c.train.epochs, 7);
  EXPECT_EQ(c.model.heads, 4);
  EXPECT_EQ(*c.seed, 3u);
  EXPECT_EQ(c.train.seed, 3u);
  EXPECT_EQ(c.gen.seed, 3u);
}

TEST(Config, EveryProblemIsListed) {
  test_support::TempDir dir;
  test_support::write_file(dir / "c.cfg", "model.pe_dim = 7\nno_such_key = 1\nthis line is broken\n");
  try {
    resolve_config(dir / "c.cfg", {{"train.learning_rate", "abc"}, {"model.heads", "0"}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_GE(e.issues().size(), 5u);
    const std::string all = e.what();
    for (const char* s : {"pe_dim", "no_such_key", ":3", "learning_rate", "heads"}) {
      EXPECT_NE(all.find(s), std::string::npos) << s << "\n" << all;
    }
  }
}

TEST(Config, SnapshotReadsBack) {
  const auto c = resolve_config(std::nullopt, {{"seed", "9"}, {"model.variant", "nope"}, {"dropout_rate", "0.15"}});
  const auto snap = snapshot(c);
  std::vector<Setting> settings(snap.begin(), snap.end());
  const auto back = resolve_config(std::nullopt, settings);
  EXPECT_EQ(snapshot(back), snap);
  EXPECT_EQ(snap.size(), known_keys().size());
}

// ---------------------------------------------------------------- exit codes

TEST(ExitCodes, UnknownCommandAndBadFlagsAreConfigErrors) {
  EXPECT_EQ(ccasgnn_run({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(ccasgnn_run({"train", "--seed", "banana"}).code, kExitConfig);
  EXPECT_EQ(ccasgnn_run({"--help"}).code, kExitOk);
}

TEST(ExitCodes, InvalidValuesExitTwoBeforeAnyWork) {
  test_support::TempDir dir;
  const auto r = ccasgnn_run({"gen-data", "--out", (dir / "o").string(), "--set", "model.pe_dim=5", "--set",
                              "gen.min_nodes=0"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("pe_dim"), std::string::npos);
  EXPECT_NE(r.err.find("min_nodes"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "o" / "corpus.jsonl"));
}

TEST(ExitCodes, MissingCorpusIsDataError) {
  test_support::TempDir dir;
  const auto r = ccasgnn_run({"train", "--out", (dir / "o").string(), "--corpus", (dir / "none.jsonl").string()});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("cannot open"), std::string::npos);
}

TEST(ExitCodes, MalformedCorpusIsDataError) {
  test_support::TempDir dir;
  test_support::write_file(dir / "bad.jsonl", "{\"id\": \"a\", \"events\": [\n");
  const auto r = ccasgnn_run({"train", "--out", (dir / "o").string(), "--corpus", (dir / "bad.jsonl").string(),
                              "--set", "feature_dim=2"});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find(":1"), std::string::npos) << r.err;
}

TEST(ExitCodes, FailedGradcheckIsNumerical) {
  test_support::TempDir dir;
  const auto r = ccasgnn_run({"gradcheck", "--out", (dir / "o").string(), "--seed", "1", "--set",
                              "model.gat_hidden=4,4", "--set", "model.gcn_hidden=4,4", "--set", "model.mlp_hidden=4",
                              "--inject-fault", "matmul"});
  EXPECT_EQ(r.code, kExitNumerical);
  EXPECT_NE(r.err.find("gradient check failed"), std::string::npos);
  const auto m = read_manifest(dir / "o" / kManifestFile);
  EXPECT_EQ(m.status, "failed");
}

// ---------------------------------------------------------------- commands

TEST_F(CliRun, GenDataWritesTheRequestedCascades) {
  const auto records = data::read_records(corpus());
  EXPECT_EQ(records.size(), 60u);
  const auto r = command({"gen-data", "--out", (dir / "gen2").string(), "--seed", "5"});
  EXPECT_EQ(test_support::read_file(corpus()), test_support::read_file(dir / "gen2" / "corpus.jsonl"));
  EXPECT_NE(r.out.find("60"), std::string::npos);

  // The printed summary matches a recount of the loaded corpus.
  data::CorpusOptions o;
  o.features = dir / "gen" / "corpus.features.jsonl";
  const auto loaded = data::load_corpus(corpus(), o);
  EXPECT_EQ(loaded.size(), 60u);
  const auto s = summarize(loaded);
  EXPECT_NE(r.out.find(summary_table("synthetic", s)), std::string::npos);
}

TEST_F(CliRun, EvalReproducesTrainingReport) {
  const auto t = command({"train", "--out", (dir / "tr").string(), "--corpus", corpus(), "--seed", "3"});
  ASSERT_EQ(t.code, 0) << t.err;
  const auto e = command({"eval", "--out", (dir / "ev").string(), "--corpus", corpus(), "--checkpoint",
                          (dir / "tr" / "checkpoint.json").string(), "--split", (dir / "tr" / "split.json").string()});
  ASSERT_EQ(e.code, 0) << e.err;
  const auto a = trainer::load_report(dir / "tr" / "report.json");
  const auto b = trainer::load_report(dir / "ev" / "report.json");
  for (const auto& split : {trainer::kTrainSplit, trainer::kValidationSplit, trainer::kTestSplit}) {
    EXPECT_NEAR(a.msle.at(split), b.msle.at(split), 1e-12) << split;
  }
  EXPECT_EQ(a.entries.size(), 60u);
}

TEST_F(CliRun, BaselinePrintsTwoRows) {
  const auto r = command({"baseline", "--out", (dir / "bl").string(), "--corpus", corpus(), "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Feature-Linear"), std::string::npos);
  EXPECT_NE(r.out.find("Feature-Deep"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "bl" / "baseline_linear.json"));
}

TEST_F(CliRun, AblateWritesFourRows) {
  const auto r = command({"ablate", "--out", (dir / "ab").string(), "--corpus", corpus(), "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_json(dir / "ab" / "ablation.json").at("rows").size(), 4u);
}

TEST_F(CliRun, VariantFlagSelectsBranch) {
  const auto r = command({"train", "--out", (dir / "v").string(), "--corpus", corpus(), "--seed", "3", "--variant",
                          "gat"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = trainer::load_report(dir / "v" / "report.json");
  EXPECT_EQ(*rep.w2, 0.0);
  EXPECT_EQ(read_manifest(dir / "v" / kManifestFile).resolved.at("model.variant"), "gat_only");
}

TEST_F(CliRun, ReplayReproducesEveryCommand) {
  const std::vector<std::vector<std::string>> runs{
      {"gen-data", "--seed", "8"},
      {"train", "--corpus", corpus(), "--seed", "3", "--dropout-rate", "0.1"},
      {"baseline", "--corpus", corpus(), "--seed", "3"},
      {"sensitivity", "--corpus", corpus(), "--seed", "3", "--set", "sensitivity.pe_dims=8",
       "--set", "sensitivity.dropout_rates=0,0.1"},
  };
  int k = 0;
  for (auto args : runs) {
    const fs::path first = dir / ("r" + std::to_string(k));
    const fs::path again = dir / ("p" + std::to_string(k++));
    args.insert(args.begin() + 1, {"--out", first.string()});
    const auto r = command(args);
    ASSERT_EQ(r.code, 0) << args[0] << ": " << r.err;
    const auto p = ccasgnn_run({"replay", "--manifest", (first / kManifestFile).string(), "--out", again.string()});
    ASSERT_EQ(p.code, 0) << p.err;
    EXPECT_EQ(compare::compare_run_dirs(first, again), std::vector<std::string>{}) << args[0];
    EXPECT_TRUE(read_manifest(again / kManifestFile).replayed_from.has_value());
  }
}

TEST_F(CliRun, SeedlessRunRecordsTheDrawnSeed) {
  const auto r = command({"baseline", "--out", (dir / "s").string(), "--corpus", corpus()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = read_manifest(dir / "s" / kManifestFile);
  EXPECT_EQ(m.resolved.at("seed"), std::to_string(m.seed));
  const auto p = ccasgnn_run({"replay", "--manifest", (dir / "s" / kManifestFile).string(), "--out",
                              (dir / "s2").string()});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(read_manifest(dir / "s2" / kManifestFile).seed, m.seed);
  EXPECT_EQ(compare::compare_run_dirs(dir / "s", dir / "s2"), std::vector<std::string>{});
}

}  // namespace
