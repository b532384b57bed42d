#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tqr/error.hpp"
#include "tqr/nn/parameter_store.hpp"

namespace tqr::nn {

inline constexpr const char* kCheckpointVersion = "tqr-ckpt-1";

// A checkpoint is one JSON manifest line followed by the raw little-endian
// float32 data of every parameter, concatenated in manifest (sorted-name)
// order. Offsets are relative to the first data byte.
struct Checkpoint {
  ParameterStore<float> params;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

inline std::string encode_checkpoint(const ParameterStore<float>& params, const nlohmann::ordered_json& metadata) {
  nlohmann::ordered_json manifest;
  manifest["version"] = kCheckpointVersion;
  manifest["byte_order"] = "little";
  manifest["metadata"] = metadata.is_null() ? nlohmann::ordered_json::object() : metadata;
  auto list = nlohmann::ordered_json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, p] : params.entries()) {
    nlohmann::ordered_json entry;
    entry["name"] = name;
    entry["shape"] = p.value.shape();
    entry["offset"] = offset;
    entry["dtype"] = "f32";
    list.push_back(std::move(entry));
    offset += 4 * p.value.size();
  }
  manifest["parameters"] = std::move(list);
  manifest["data_bytes"] = offset;

  std::string out = manifest.dump();
  out.push_back('\n');
  out.reserve(out.size() + offset);
  for (const auto& [_, p] : params.entries()) {
    for (float v : p.value.values()) {
      auto bits = std::bit_cast<std::uint32_t>(v);
      for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
    }
  }
  return out;
}

inline Checkpoint decode_checkpoint(const std::string& bytes, const std::string& origin = "checkpoint") {
  auto fail = [&](const std::string& msg) -> InputError { return InputError(origin + ": " + msg); };
  auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw fail("missing manifest line");
  nlohmann::ordered_json manifest;
  try {
    manifest = nlohmann::ordered_json::parse(bytes.substr(0, nl));
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("malformed manifest: ") + e.what());
  }
  if (!manifest.contains("version") || manifest["version"] != kCheckpointVersion) {
    std::string found = manifest.contains("version") ? manifest["version"].dump() : "none";
    throw fail(std::string("unsupported checkpoint version ") + found + ", expected \"" + kCheckpointVersion + "\"");
  }
  const std::uint64_t available = bytes.size() - nl - 1;
  Checkpoint ckpt;
  try {
    if (manifest.contains("metadata")) ckpt.metadata = manifest["metadata"];
    const auto& list = manifest.at("parameters");
    const std::uint64_t declared = manifest.at("data_bytes").get<std::uint64_t>();
    if (available < declared) {
      throw fail("truncated data: manifest declares " + std::to_string(declared) + " bytes, file holds " +
                 std::to_string(available));
    }
    if (available > declared) throw fail("trailing bytes after parameter data");
    const char* data = bytes.data() + nl + 1;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& entry = list[i];
      const std::string name = entry.at("name").get<std::string>();
      if (entry.at("dtype") != "f32") throw fail("parameter '" + name + "': unsupported dtype " + entry["dtype"].dump());
      Shape shape = entry.at("shape").get<Shape>();
      const std::uint64_t offset = entry.at("offset").get<std::uint64_t>();
      const std::uint64_t next = i + 1 < list.size() ? list[i + 1].at("offset").get<std::uint64_t>() : declared;
      const std::uint64_t nbytes = 4 * shape_size(shape);
      if (offset + nbytes != next) {
        throw fail("parameter '" + name + "': shape " + shape_string(shape) + " implies " + std::to_string(nbytes) +
                   " bytes but the manifest allots " + std::to_string(next - offset));
      }
      std::vector<float> values(shape_size(shape));
      for (std::size_t k = 0; k < values.size(); ++k) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) {
          bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[offset + 4 * k + b])) << (8 * b);
        }
        values[k] = std::bit_cast<float>(bits);
      }
      ckpt.params.add(name, Tensor<float>(std::move(shape), std::move(values)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("malformed manifest: ") + e.what());
  } catch (const ContractViolation& e) {
    throw fail(e.what());
  }
  return ckpt;
}

inline void save_checkpoint(const ParameterStore<float>& params, const std::filesystem::path& path,
                            const nlohmann::ordered_json& metadata = nlohmann::ordered_json::object()) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write checkpoint " + path.string());
  const std::string bytes = encode_checkpoint(params, metadata);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing checkpoint " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes, path.string());
}

}  // namespace tqr::nn
