#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "knowcat/dataset.hpp"
#include "knowcat/jsonl.hpp"

namespace knowcat {

// Provenance of one sampling run. Written next to the response cache and
// copied into every report derived from it.
struct RunManifest {
  std::string dataset_path;
  std::string dataset_hash;
  std::size_t dataset_records = 0;
  std::size_t subset_size = 0;
  std::uint64_t subset_seed = 0;
  bool dedup = false;
  std::string model_id;
  std::string backend;  // "mock" or "http"
  PromptMode mode = PromptMode::kInternal;
  PromptStyle style = PromptStyle::kDirect;
  std::string template_hash;
  std::size_t n_total = 7;
  double temperature = 1.0;
  int max_tokens = 0;
  std::string config_fingerprint;
  std::string started_at;
  std::string finished_at;
  std::string tool_version = KNOWCAT_VERSION;

  OrderedJson to_json() const;
  static RunManifest from_json(const Json& j);

  bool operator==(const RunManifest&) const = default;
};

inline constexpr const char* kManifestFile = "manifest.json";

void write_manifest(const std::filesystem::path& dir, const RunManifest& m);
std::optional<RunManifest> read_manifest(const std::filesystem::path& dir);

// UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string iso_timestamp_now();

}  // namespace knowcat
