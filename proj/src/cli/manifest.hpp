#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace batchq::cli {

struct RunManifest {
  std::string command;
  nlohmann::json parameters;
  std::optional<std::uint64_t> seed;
  std::string version;
  std::vector<std::string> outputs;
};

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& doc);

std::filesystem::path manifest_path(const std::filesystem::path& output);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

} // namespace batchq::cli
