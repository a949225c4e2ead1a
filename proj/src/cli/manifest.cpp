#include "manifest.hpp"

#include <fstream>

#include "batchq/errors.hpp"

namespace batchq::cli {

using nlohmann::json;

json to_json(const RunManifest& manifest) {
  json doc = {{"command", manifest.command},
              {"version", manifest.version},
              {"parameters", manifest.parameters},
              {"outputs", manifest.outputs}};
  doc["seed"] = manifest.seed ? json(*manifest.seed) : json(nullptr);
  return doc;
}

RunManifest manifest_from_json(const json& doc) {
  try {
    RunManifest m;
    m.command = doc.at("command").get<std::string>();
    m.version = doc.at("version").get<std::string>();
    m.parameters = doc.at("parameters");
    m.outputs = doc.at("outputs").get<std::vector<std::string>>();
    if (!doc.at("seed").is_null()) m.seed = doc.at("seed").get<std::uint64_t>();
    return m;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed manifest: ") + e.what());
  }
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write manifest " + path.string());
  out << to_json(manifest).dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  return manifest_from_json(doc);
}

} // namespace batchq::cli
