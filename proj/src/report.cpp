#include "knowcat/report.hpp"

#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include "knowcat/error.hpp"
#include "knowcat/hashing.hpp"
#include "knowcat/plot.hpp"

namespace knowcat {
namespace {

namespace fs = std::filesystem;

OrderedJson ratios_json(const TransitionRatios& r) {
  OrderedJson j;
  j["upgrade"] = round4(r.upgrade);
  j["downgrade"] = round4(r.downgrade);
  j["stable"] = round4(r.stable);
  return j;
}

OrderedJson category_labels() {
  OrderedJson labels = OrderedJson::array();
  for (Category c : kAllCategories) labels.push_back(std::string(label_of(c)));
  return labels;
}

OrderedJson ratio_map(const CategoryDistribution& d) {
  OrderedJson j;
  for (Category c : kAllCategories) {
    j["r" + std::to_string(index_of(c))] = round4(d.ratio(c));
  }
  return j;
}

std::optional<RunManifest> manifest_next_to(const std::string& file) {
  auto dir = fs::path(file).parent_path();
  if (dir.empty()) dir = ".";
  return read_manifest(dir);
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_atomic(path, text);
}

}  // namespace

OrderedJson manifest_block(const std::optional<RunManifest>& manifest) {
  if (!manifest) return nullptr;
  return manifest->to_json();
}

std::string dump_report(const OrderedJson& report) { return report.dump(2) + "\n"; }

OrderedJson metrics_report(const std::vector<ClassificationResult>& results,
                           const std::optional<RunManifest>& manifest) {
  const auto dist = category_distribution(results);
  OrderedJson j;
  j["n_records"] = results.size();
  j["accuracy"] = round4(accuracy(results));
  j["category_score"] = round4(category_score(dist));
  j["ratios"] = ratio_map(dist);
  OrderedJson cats = OrderedJson::array();
  for (Category c : kAllCategories) {
    OrderedJson e;
    e["index"] = index_of(c);
    e["label"] = std::string(label_of(c));
    e["name"] = std::string(full_name_of(c));
    e["color"] = std::string(color_of(c));
    e["count"] = dist.counts[slot_of(c)];
    e["ratio"] = round4(dist.ratio(c));
    cats.push_back(std::move(e));
  }
  j["categories"] = std::move(cats);
  j["manifest"] = manifest_block(manifest);
  return j;
}

OrderedJson comparison_report(const TransitionMatrix& matrix,
                              const std::optional<RunManifest>& base,
                              const std::optional<RunManifest>& target) {
  OrderedJson j;
  j["n_common"] = matrix.total;
  OrderedJson m;
  m["rows"] = "base category";
  m["columns"] = "target category";
  m["categories"] = category_labels();
  OrderedJson counts = OrderedJson::array();
  for (const auto& row : matrix.counts) counts.push_back(row);
  m["counts"] = std::move(counts);
  j["matrix"] = std::move(m);
  j["overall"] = ratios_json(transition_ratios(matrix));

  const auto rows = per_category_ratios(matrix);
  OrderedJson per = OrderedJson::array();
  for (Category c : kAllCategories) {
    OrderedJson e;
    e["category"] = std::string(label_of(c));
    std::size_t support = 0;
    for (auto n : matrix.counts[slot_of(c)]) support += n;
    e["support"] = support;
    e["ratios"] = rows[slot_of(c)] ? ratios_json(*rows[slot_of(c)]) : OrderedJson(nullptr);
    per.push_back(std::move(e));
  }
  j["per_category"] = std::move(per);
  j["skipped"] = {{"only_in_base", matrix.only_in_base},
                  {"only_in_target", matrix.only_in_target}};
  j["base_manifest"] = manifest_block(base);
  j["target_manifest"] = manifest_block(target);
  return j;
}

OrderedJson heatmap_report(const LayerHeatmap& heatmap,
                           const std::optional<RunManifest>& manifest) {
  OrderedJson j;
  j["rows"] = "layer";
  j["columns"] = "category";
  j["layer_count"] = heatmap.layer_count;
  j["categories"] = category_labels();
  OrderedJson cells = OrderedJson::array();
  OrderedJson support = OrderedJson::array();
  for (std::size_t l = 0; l < heatmap.cells.size(); ++l) {
    OrderedJson row = OrderedJson::array();
    for (const auto& v : heatmap.cells[l]) {
      row.push_back(v ? OrderedJson(round4(*v)) : OrderedJson(nullptr));
    }
    cells.push_back(std::move(row));
    support.push_back(heatmap.support[l]);
  }
  j["cells"] = std::move(cells);
  j["support"] = std::move(support);
  j["manifest"] = manifest_block(manifest);
  return j;
}

// ---------------------------------------------------------------------------

SnapshotSummary cmd_sample(const SampleOptions& options, std::ostream& log) {
  if (options.dataset.empty()) throw UsageError("--dataset is required");
  if (options.out_dir.empty()) throw UsageError("--out-dir is required");
  if (options.mock.empty() == options.endpoint.empty()) {
    throw UsageError("exactly one of --mock or --endpoint is required");
  }
  if (!options.endpoint.empty() && options.model_id.empty()) {
    throw UsageError("--model is required with --endpoint");
  }
  if (!fs::exists(options.dataset)) {
    throw UsageError("dataset not found: " + options.dataset);
  }

  auto records = load_dataset(options.dataset, options.format);
  const std::size_t dataset_records = records.size();
  if (options.dedup) records = dedup_by_question(records);

  std::size_t k = 0;
  if (options.subset) {
    k = *options.subset;
  } else {
    k = std::min(kDefaultSubsetSize, records.size());
    if (k < kDefaultSubsetSize) {
      log << "note: dataset has " << records.size()
          << " records; using all of them\n";
    }
  }
  records = sample_subset(records, k, options.seed);

  SamplingConfig config;
  config.n_total = options.n_total;
  config.temperature = options.temperature;
  config.max_tokens = options.max_tokens;
  config.model_id = options.model_id.empty() ? "mock" : options.model_id;
  config.dataset_id = sha256_file_hex(options.dataset);
  config.prompt = options.template_path.empty()
                      ? PromptSpec::make_default(options.mode, options.style)
                      : load_prompt_spec(options.template_path, options.mode,
                                         options.style);
  config.validate();

  std::unique_ptr<Backend> backend;
  if (!options.mock.empty()) {
    backend = std::make_unique<MockBackend>(
        MockModelSpec::load(options.mock, options.mock_seed));
  } else {
    HttpBackendConfig http;
    http.endpoint = options.endpoint;
    http.model_id = options.model_id;
    if (const char* key = std::getenv(kApiKeyEnv)) http.api_key = key;
    backend = std::make_unique<HttpBackend>(std::move(http));
  }

  RunManifest manifest;
  manifest.dataset_path = fs::absolute(options.dataset).lexically_normal().string();
  manifest.dataset_hash = config.dataset_id;
  manifest.dataset_records = dataset_records;
  manifest.subset_seed = options.seed;
  manifest.dedup = options.dedup;

  SnapshotOptions snap;
  snap.dir = options.out_dir;
  snap.concurrency = options.concurrency;
  snap.retry.max_attempts = options.max_attempts;
  snap.retry.base_delay = std::chrono::milliseconds(options.retry_base_ms);

  auto summary = run_snapshot(records, config, *backend, snap, std::move(manifest));
  log << "sampled " << summary.total << " records (" << summary.cached
      << " cached, " << summary.queried << " queried, " << summary.failures.size()
      << " failed) into " << (summary.dir / kResponsesFile).string() << "\n";
  if (!summary.ok()) {
    log << "failure manifest: " << (summary.dir / kFailuresFile).string() << "\n";
  }
  return summary;
}

ClassifyOutcome cmd_classify(const ClassifyOptions& options, std::ostream& log) {
  if (options.snapshot.empty()) throw UsageError("--snapshot is required");
  const Snapshot snap = load_snapshot(options.snapshot);

  std::string dataset = options.dataset;
  if (dataset.empty() && snap.manifest) dataset = snap.manifest->dataset_path;
  if (dataset.empty()) {
    throw UsageError("--dataset is required when the snapshot has no manifest");
  }
  const PromptStyle style = options.style ? *options.style
                            : snap.manifest ? snap.manifest->style
                                            : PromptStyle::kDirect;

  const auto records = load_dataset(dataset, options.format);
  ClassifyOutcome out;
  out.results = classify_snapshot(snap.responses, gold_map(records), style);
  if (out.results.empty()) throw Error("snapshot has no records to classify");
  out.distribution = category_distribution(out.results);
  out.accuracy = accuracy(out.results);
  out.score = category_score(out.distribution);

  const fs::path dir = options.out_dir.empty() ? options.snapshot : options.out_dir;
  fs::create_directories(dir);
  std::ostringstream lines;
  write_classification(out.results, lines);
  write_text(dir / kClassificationFile, lines.str());
  write_text(dir / kMetricsFile, dump_report(metrics_report(out.results, snap.manifest)));
  const std::vector<LabeledDistribution> series = {
      {snap.manifest ? snap.manifest->model_id : "run", out.distribution}};
  write_text(dir / kCategoryBarsCsv, category_bars_csv(series));
  if (options.svg) {
    write_text(dir / kCategoryBarsSvg, stacked_bars_svg(series, "Knowledge categories"));
  }
  if (snap.manifest && !fs::equivalent(dir, options.snapshot)) {
    write_manifest(dir, *snap.manifest);
  }

  log << "classified " << out.results.size() << " records: accuracy "
      << round4(out.accuracy) << ", category score " << round4(out.score) << "\n";
  return out;
}

TransitionMatrix cmd_compare(const CompareOptions& options, std::ostream& log) {
  if (options.base.empty() || options.target.empty()) {
    throw UsageError("--base and --target are required");
  }
  if (options.out_dir.empty()) throw UsageError("--out-dir is required");
  const auto base = load_classification(options.base);
  const auto target = load_classification(options.target);
  auto matrix = transition_matrix(base, target);

  fs::create_directories(options.out_dir);
  write_text(options.out_dir / kTransitionsFile,
             dump_report(comparison_report(matrix, manifest_next_to(options.base),
                                           manifest_next_to(options.target))));
  write_text(options.out_dir / kTransitionBarsCsv, transition_bars_csv(matrix));

  const auto r = transition_ratios(matrix);
  log << "compared " << matrix.total << " common records: upgrade "
      << round4(r.upgrade) << ", downgrade " << round4(r.downgrade) << ", stable "
      << round4(r.stable) << "\n";
  if (!matrix.only_in_base.empty() || !matrix.only_in_target.empty()) {
    log << "skipped " << matrix.only_in_base.size() << " base-only and "
        << matrix.only_in_target.size() << " target-only records\n";
  }
  return matrix;
}

LayerHeatmap cmd_layers(const LayersOptions& options, std::ostream& log) {
  if (options.export_path.empty() || options.classification.empty()) {
    throw UsageError("--export and --classification are required");
  }
  if (options.out_dir.empty()) throw UsageError("--out-dir is required");
  const auto records = load_layer_export(options.export_path);
  if (records.empty()) throw Error(options.export_path + ": layer export is empty");
  const auto results = load_classification(options.classification);
  auto heatmap = layer_heatmap(records, results);

  fs::create_directories(options.out_dir);
  write_text(options.out_dir / kHeatmapFile,
             dump_report(heatmap_report(heatmap, manifest_next_to(options.classification))));
  write_text(options.out_dir / kHeatmapCsv, heatmap_csv(heatmap));
  if (options.svg) {
    write_text(options.out_dir / kHeatmapSvg,
               heatmap_svg(heatmap, "Gold-answer probability by layer and category"));
  }
  log << "aggregated " << records.size() << " export rows over "
      << heatmap.layer_count << " layers\n";
  return heatmap;
}

std::vector<TrackPoint> cmd_track(const TrackOptions& options, std::ostream& log) {
  if (options.files.size() < 2) {
    throw UsageError("track needs at least two classification files");
  }
  if (!options.labels.empty() && options.labels.size() != options.files.size()) {
    throw UsageError("--labels must name every file");
  }
  if (options.out_dir.empty()) throw UsageError("--out-dir is required");

  std::vector<std::vector<ClassificationResult>> runs;
  std::vector<std::optional<RunManifest>> manifests;
  std::vector<TrackPoint> points;
  for (std::size_t i = 0; i < options.files.size(); ++i) {
    runs.push_back(load_classification(options.files[i]));
    manifests.push_back(manifest_next_to(options.files[i]));
    if (runs.back().empty()) throw Error(options.files[i] + ": no records");
    TrackPoint p;
    p.label = options.labels.empty() ? options.files[i] : options.labels[i];
    p.accuracy = accuracy(runs.back());
    p.distribution = category_distribution(runs.back());
    p.score = category_score(p.distribution);
    points.push_back(std::move(p));
  }

  for (std::size_t i = 1; i < manifests.size(); ++i) {
    if (manifests[i - 1] && manifests[i] &&
        manifests[i]->started_at < manifests[i - 1]->started_at) {
      log << "warning: run timestamps are not increasing at step " << i + 1
          << "; using argument order\n";
      break;
    }
  }

  fs::create_directories(options.out_dir);
  OrderedJson steps = OrderedJson::array();
  std::ostringstream csv;
  csv << "step,label,accuracy,category_score,r1,r2,r3,r4,r5,r6\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    OrderedJson s;
    s["step"] = i + 1;
    s["label"] = p.label;
    s["n_records"] = p.distribution.total;
    s["accuracy"] = round4(p.accuracy);
    s["category_score"] = round4(p.score);
    s["ratios"] = ratio_map(p.distribution);
    s["manifest"] = manifest_block(manifests[i]);
    steps.push_back(std::move(s));
    csv << i + 1 << ',' << p.label << ',' << Json(round4(p.accuracy)).dump() << ','
        << Json(round4(p.score)).dump();
    for (Category c : kAllCategories) {
      csv << ',' << Json(round4(p.distribution.ratio(c))).dump();
    }
    csv << '\n';
  }

  OrderedJson transitions = OrderedJson::array();
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const auto matrix = transition_matrix(runs[i - 1], runs[i]);
    const std::string name = "transitions_step" + std::to_string(i) + "_step" +
                             std::to_string(i + 1) + ".json";
    write_text(options.out_dir / name,
               dump_report(comparison_report(matrix, manifests[i - 1], manifests[i])));
    OrderedJson t;
    t["from_step"] = i;
    t["to_step"] = i + 1;
    t["report"] = name;
    t["overall"] = ratios_json(transition_ratios(matrix));
    transitions.push_back(std::move(t));
  }

  OrderedJson report;
  report["steps"] = std::move(steps);
  report["transitions"] = std::move(transitions);
  write_text(options.out_dir / kTrackFile, dump_report(report));
  write_text(options.out_dir / kTrackCsv, csv.str());

  std::vector<LabeledDistribution> series;
  for (const auto& p : points) series.emplace_back(p.label, p.distribution);
  write_text(options.out_dir / kCategoryBarsCsv, category_bars_csv(series));
  if (options.svg) {
    write_text(options.out_dir / kTrackSvg,
               stacked_bars_svg(series, "Knowledge categories by step"));
  }
  log << "tracked " << points.size() << " steps\n";
  return points;
}

}  // namespace knowcat
