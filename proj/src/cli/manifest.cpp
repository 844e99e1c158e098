#include "ccasgnn/cli/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "ccasgnn/errors.hpp"

namespace ccasgnn::cli {
using nlohmann::json;

json to_json(const RunManifest& m) {
  json j = {{"command", m.command},
            {"config_path", m.config_path ? json(m.config_path->string()) : json(nullptr)},
            {"resolved", m.resolved},
            {"seed", m.seed},
            {"outputs", m.outputs},
            {"started", m.started},
            {"finished", m.finished},
            {"status", m.status},
            {"error", m.error}};
  if (m.replayed_from) j["replayed_from"] = m.replayed_from->string();
  return j;
}

RunManifest manifest_from_json(const json& j) {
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    if (!j.at("config_path").is_null()) m.config_path = j.at("config_path").get<std::string>();
    m.resolved = j.at("resolved").get<std::map<std::string, std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    m.status = j.value("status", "ok");
    m.error = j.value("error", "");
    if (j.contains("replayed_from")) m.replayed_from = j.at("replayed_from").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed run manifest: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(m).dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return manifest_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ccasgnn::cli
