#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ccasgnn::compare {

// Wall-clock fields legitimately differ between identical runs.
inline bool is_timing_key(const std::string& key) {
  return key.find("seconds") != std::string::npos || key == "started" || key == "finished";
}

inline void json_diff(const nlohmann::json& a, const nlohmann::json& b, double tol, const std::string& path,
                      std::vector<std::string>& out) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    if (!(std::abs(x - y) <= tol) && !(std::isnan(x) && std::isnan(y))) out.push_back(path);
    return;
  }
  if (a.type() != b.type()) {
    out.push_back(path + " (type)");
    return;
  }
  if (a.is_object()) {
    if (a.size() != b.size()) out.push_back(path + " (keys)");
    for (const auto& [key, value] : a.items()) {
      if (is_timing_key(key)) continue;
      if (!b.contains(key)) {
        out.push_back(path + "/" + key + " (missing)");
        continue;
      }
      json_diff(value, b.at(key), tol, path + "/" + key, out);
    }
  } else if (a.is_array()) {
    if (a.size() != b.size()) {
      out.push_back(path + " (length)");
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) json_diff(a[i], b[i], tol, path + "/" + std::to_string(i), out);
  } else if (a != b) {
    out.push_back(path);
  }
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Compares every artifact two runs wrote: JSON numerically (timing fields
/// skipped), JSONL byte for byte. Text tables and the manifests are
/// presentation and bookkeeping, so they are left out. Returns the
/// differences found.
inline std::vector<std::string> compare_run_dirs(const std::filesystem::path& a, const std::filesystem::path& b,
                                                 double tol = 1e-12) {
  std::vector<std::string> out;
  std::size_t compared = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a)) {
    const auto name = entry.path().filename().string();
    const auto ext = entry.path().extension().string();
    if (name == "manifest.json" || (ext != ".json" && ext != ".jsonl")) continue;
    const auto other = b / name;
    if (!std::filesystem::exists(other)) {
      out.push_back(name + " missing");
      continue;
    }
    ++compared;
    if (ext == ".jsonl") {
      if (slurp(entry.path()) != slurp(other)) out.push_back(name + " differs");
      continue;
    }
    std::vector<std::string> diffs;
    json_diff(nlohmann::json::parse(slurp(entry.path())), nlohmann::json::parse(slurp(other)), tol, name, diffs);
    out.insert(out.end(), diffs.begin(), diffs.end());
  }
  if (compared == 0) out.push_back("no artifacts in " + a.string());
  return out;
}

}  // namespace ccasgnn::compare
