#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "knowcat/classifier.hpp"
#include "knowcat/dataset.hpp"
#include "knowcat/manifest.hpp"
#include "knowcat/metrics.hpp"
#include "knowcat/sampler.hpp"
#include "knowcat/transitions.hpp"

namespace knowcat {

inline constexpr std::size_t kDefaultSubsetSize = 3000;

inline constexpr const char* kClassificationFile = "classification.jsonl";
inline constexpr const char* kMetricsFile = "metrics.json";
inline constexpr const char* kCategoryBarsCsv = "category_bars.csv";
inline constexpr const char* kCategoryBarsSvg = "category_bars.svg";
inline constexpr const char* kTransitionsFile = "transitions.json";
inline constexpr const char* kTransitionBarsCsv = "transition_bars.csv";
inline constexpr const char* kHeatmapFile = "heatmap.json";
inline constexpr const char* kHeatmapCsv = "heatmap.csv";
inline constexpr const char* kHeatmapSvg = "heatmap.svg";
inline constexpr const char* kTrackFile = "track.json";
inline constexpr const char* kTrackCsv = "track.csv";
inline constexpr const char* kTrackSvg = "track_bars.svg";

// ---- report bodies (pure) --------------------------------------------------

OrderedJson manifest_block(const std::optional<RunManifest>& manifest);

OrderedJson metrics_report(const std::vector<ClassificationResult>& results,
                           const std::optional<RunManifest>& manifest);

OrderedJson comparison_report(const TransitionMatrix& matrix,
                              const std::optional<RunManifest>& base,
                              const std::optional<RunManifest>& target);

OrderedJson heatmap_report(const LayerHeatmap& heatmap,
                           const std::optional<RunManifest>& manifest);

// Serialized form used for every JSON report: two-space indent, trailing
// newline.
std::string dump_report(const OrderedJson& report);

// ---- commands --------------------------------------------------------------

struct SampleOptions {
  std::string dataset;
  DatasetFormat format;
  std::optional<std::size_t> subset;  // default: min(3000, dataset size)
  std::uint64_t seed = 0;
  bool dedup = false;
  std::string model_id;
  std::string endpoint;   // remote backend when set
  std::string mock;       // mock spec path when set
  std::uint64_t mock_seed = 0;
  PromptMode mode = PromptMode::kInternal;
  PromptStyle style = PromptStyle::kDirect;
  std::string template_path;
  std::size_t n_total = 7;
  double temperature = 1.0;
  int max_tokens = 64;
  std::size_t concurrency = 4;
  int max_attempts = 5;
  int retry_base_ms = 500;
  std::filesystem::path out_dir;
};

// Throws UsageError for bad flag combinations.
SnapshotSummary cmd_sample(const SampleOptions& options, std::ostream& log);

struct ClassifyOptions {
  std::filesystem::path snapshot;
  std::string dataset;  // gold answers; defaults to the manifest's dataset
  DatasetFormat format;
  std::optional<PromptStyle> style;  // defaults to the manifest's style
  std::filesystem::path out_dir;     // defaults to the snapshot directory
  bool svg = false;
};

struct ClassifyOutcome {
  std::vector<ClassificationResult> results;
  CategoryDistribution distribution;
  double accuracy = 0.0;
  double score = 0.0;
};

ClassifyOutcome cmd_classify(const ClassifyOptions& options, std::ostream& log);

struct CompareOptions {
  std::string base;
  std::string target;
  std::filesystem::path out_dir;
};

TransitionMatrix cmd_compare(const CompareOptions& options, std::ostream& log);

struct LayersOptions {
  std::string export_path;
  std::string classification;
  std::filesystem::path out_dir;
  bool svg = false;
};

LayerHeatmap cmd_layers(const LayersOptions& options, std::ostream& log);

struct TrackOptions {
  std::vector<std::string> files;  // classification files, in step order
  std::vector<std::string> labels; // optional, one per file
  std::filesystem::path out_dir;
  bool svg = false;
};

struct TrackPoint {
  std::string label;
  double accuracy = 0.0;
  double score = 0.0;
  CategoryDistribution distribution;
};

std::vector<TrackPoint> cmd_track(const TrackOptions& options,
                                  std::ostream& log);

}  // namespace knowcat
