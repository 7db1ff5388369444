#include "knowcat/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "knowcat/error.hpp"

namespace knowcat {

OrderedJson RunManifest::to_json() const {
  OrderedJson j;
  j["dataset_path"] = dataset_path;
  j["dataset_hash"] = dataset_hash;
  j["dataset_records"] = dataset_records;
  j["subset_size"] = subset_size;
  j["subset_seed"] = subset_seed;
  j["dedup"] = dedup;
  j["model_id"] = model_id;
  j["backend"] = backend;
  j["mode"] = std::string(to_string(mode));
  j["style"] = std::string(to_string(style));
  j["template_hash"] = template_hash;
  j["n_total"] = n_total;
  j["temperature"] = temperature;
  j["max_tokens"] = max_tokens;
  j["config_fingerprint"] = config_fingerprint;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["tool_version"] = tool_version;
  return j;
}

RunManifest RunManifest::from_json(const Json& j) {
  try {
    RunManifest m;
    m.dataset_path = j.at("dataset_path").get<std::string>();
    m.dataset_hash = j.at("dataset_hash").get<std::string>();
    m.dataset_records = j.at("dataset_records").get<std::size_t>();
    m.subset_size = j.at("subset_size").get<std::size_t>();
    m.subset_seed = j.at("subset_seed").get<std::uint64_t>();
    m.dedup = j.at("dedup").get<bool>();
    m.model_id = j.at("model_id").get<std::string>();
    m.backend = j.at("backend").get<std::string>();
    m.mode = parse_prompt_mode(j.at("mode").get<std::string>());
    m.style = parse_prompt_style(j.at("style").get<std::string>());
    m.template_hash = j.at("template_hash").get<std::string>();
    m.n_total = j.at("n_total").get<std::size_t>();
    m.temperature = j.at("temperature").get<double>();
    m.max_tokens = j.at("max_tokens").get<int>();
    m.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    return m;
  } catch (const Json::exception& e) {
    throw Error(std::string("invalid run manifest: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  write_file_atomic(dir / kManifestFile, m.to_json().dump(2) + "\n");
}

std::optional<RunManifest> read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / kManifestFile;
  if (!std::filesystem::exists(path)) return std::nullopt;
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(path.string() + ": invalid JSON: " + e.what());
  }
  return RunManifest::from_json(j);
}

std::string iso_timestamp_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace knowcat
