#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccasgnn/cli/config.hpp"
#include "ccasgnn/cli/manifest.hpp"

namespace ccasgnn::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitNumerical = 4,
};

struct CommandContext {
  RunConfig config;
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path out_dir;
  std::ostream& out;
  std::ostream& err;
  std::optional<std::filesystem::path> replayed_from;
};

/// Artifacts written by a command, by role.
using Outputs = std::map<std::string, std::string>;

const std::vector<std::string>& command_names();

/// Runs one command and writes its manifest into the output directory.
/// Draws and records a seed when none is set. Exceptions propagate after
/// the manifest records the failure.
int dispatch(const std::string& command, CommandContext& ctx);

/// Maps an in-flight exception to an exit code, printing it to `err`.
int exit_code_for_current_exception(std::ostream& err);

/// Re-runs the command a manifest describes into `out_dir`.
int replay(const std::filesystem::path& manifest_path, const std::filesystem::path& out_dir,
           std::ostream& out, std::ostream& err);

/// Size and growth statistics of a corpus, one row per table.
struct CorpusSummary {
  std::size_t cascades = 0;
  double avg_nodes = 0.0;
  double avg_edges = 0.0;
  double avg_growth = 0.0;
};
CorpusSummary summarize(std::span<const data::CascadeGraph> corpus);
std::string summary_table(const std::string& name, const CorpusSummary& s);

}  // namespace ccasgnn::cli
