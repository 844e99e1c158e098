#include "ccasgnn/cli/app.hpp"

#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "ccasgnn/cli/commands.hpp"
#include "ccasgnn/errors.hpp"

namespace ccasgnn::cli {

namespace {

struct Flags {
  std::optional<std::string> config;
  std::string out = "ccasgnn-out";
  std::vector<std::string> set;
  std::map<std::string, std::optional<std::string>> direct;
  std::string manifest;
};

// Flags that map one-to-one onto a config key.
const std::vector<std::pair<std::string, std::string>> kDirectFlags{
    {"--corpus", "corpus"},          {"--features", "features"},         {"--checkpoint", "checkpoint"},
    {"--split", "split"},            {"--window", "window"},             {"--seed", "seed"},
    {"--variant", "model.variant"},  {"--dp", "model.pe_dim"},           {"--dropout-rate", "dropout_rate"},
    {"--inject-fault", "inject_fault"}};

void add_common(CLI::App* sub, Flags& flags) {
  sub->add_option("--config", flags.config, "key = value settings file");
  sub->add_option("--out", flags.out, "output directory")->capture_default_str();
  sub->add_option("--set", flags.set, "override any setting, key=value (repeatable)");
  for (const auto& [flag, key] : kDirectFlags) {
    auto* opt = sub->add_option(flag, flags.direct[key], "sets " + key);
    if (flag == "--inject-fault") opt->group("");
  }
}

std::vector<Setting> overrides(const Flags& flags) {
  std::vector<Setting> out;
  std::vector<std::string> issues;
  for (const auto& s : flags.set) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      issues.push_back("--set " + s + ": expected key=value");
      continue;
    }
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  // Dedicated flags outrank --set.
  for (const auto& [flag, key] : kDirectFlags) {
    if (const auto& v = flags.direct.at(key)) out.emplace_back(key, *v);
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cascade popularity prediction with collaborative graph neural networks", "ccasgnn"};
  app.require_subcommand(1);
  Flags flags;
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> help{
      {"gen-data", "generate a synthetic cascade corpus"},
      {"train", "train a model and write checkpoint and report"},
      {"eval", "evaluate a checkpoint on a corpus"},
      {"ablate", "train the four ablation variants"},
      {"sensitivity", "sweep positional-encoding width and edge dropout"},
      {"baseline", "fit the Feature-Linear and Feature-Deep baselines"},
      {"gradcheck", "compare analytic gradients with finite differences"}};
  for (const auto& name : command_names()) {
    subs[name] = app.add_subcommand(name, help.at(name));
    add_common(subs[name], flags);
  }
  auto* replay_cmd = app.add_subcommand("replay", "re-run a command from its manifest");
  replay_cmd->add_option("--manifest", flags.manifest, "manifest.json of an earlier run")->required();
  replay_cmd->add_option("--out", flags.out, "output directory")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }

  if (replay_cmd->parsed()) return replay(flags.manifest, flags.out, out, err);

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      std::optional<std::filesystem::path> config_path;
      if (flags.config) config_path = *flags.config;
      CommandContext ctx{resolve_config(config_path, overrides(flags)), config_path, flags.out, out, err, {}};
      return dispatch(name, ctx);
    } catch (...) {
      return exit_code_for_current_exception(err);
    }
  }
  return kExitConfig;
}

}  // namespace ccasgnn::cli
