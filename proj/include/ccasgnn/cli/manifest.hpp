#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace ccasgnn::cli {

/// What a command ran with and what it produced. The resolved settings are
/// enough to run it again.
struct RunManifest {
  std::string command;
  std::optional<std::filesystem::path> config_path;
  std::map<std::string, std::string> resolved;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> outputs;
  std::string started;
  std::string finished;
  std::string status = "ok";
  std::string error;
  /// Set when this run was replayed from another manifest.
  std::optional<std::filesystem::path> replayed_from;
};

inline const std::string kManifestFile = "manifest.json";

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

/// UTC time as 2024-01-31T12:00:00Z.
std::string utc_timestamp();

}  // namespace ccasgnn::cli
