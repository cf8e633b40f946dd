#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fmt/format.h>
#include <stdexcept>

namespace sphlab::cli {

const char* const kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json j;
  j["tool"] = "sphlab";
  j["version"] = kToolVersion;
  j["command_line"] = m.command_line;
  j["config"] = m.config;
  j["summary"] = m.summary;
  j["result_sha256"] = m.result_sha256;
  j["wall_time_seconds"] = m.wall_time_seconds;
  return j;
}

}  // namespace sphlab::cli
