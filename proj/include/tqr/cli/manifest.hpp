#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tqr/corpus/dataset.hpp"
#include "tqr/error.hpp"

namespace tqr::cli {

inline constexpr const char* kToolVersion = "tqr 1.0.0";

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

inline std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(corpus::read_file(path)); }

// Writes to a sibling temporary file, then renames it into place.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  corpus::write_file(tmp, content);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InputError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

// Record of one command invocation. Holds no wall-clock fields, so the same
// inputs always give the same bytes.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<std::filesystem::path> datasets;
  std::uint64_t seed = 0;
  nlohmann::ordered_json artifacts = nlohmann::ordered_json::object();  // paths relative to the output directory

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["tool_version"] = kToolVersion;
    j["seed"] = seed;
    j["config"] = config;
    auto list = nlohmann::ordered_json::array();
    for (const auto& p : datasets) {
      nlohmann::ordered_json d;
      d["path"] = p.string();
      d["sha256"] = std::filesystem::exists(p) ? sha256_file(p) : "";
      list.push_back(std::move(d));
    }
    j["datasets"] = std::move(list);
    j["artifacts"] = artifacts;
    return j;
  }

  void write(const std::filesystem::path& path) const { write_atomic(path, to_json().dump(2) + "\n"); }
};

}  // namespace tqr::cli
