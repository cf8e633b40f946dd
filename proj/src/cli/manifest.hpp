#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sphlab::cli {

extern const char* const kToolVersion;

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

struct RunManifest {
  std::vector<std::string> command_line;
  nlohmann::json config;
  nlohmann::json summary;
  double wall_time_seconds = 0.0;
  std::string result_sha256;
};

/// Keys: tool, version, command_line, config, summary, result_sha256 and
/// wall_time_seconds. Only the last one varies between identical runs.
nlohmann::json to_json(const RunManifest& m);

}  // namespace sphlab::cli
