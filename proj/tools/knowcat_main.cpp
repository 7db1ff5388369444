// knowcat: sample, classify and compare knowledge-category snapshots.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <iostream>

#include "CLI11.hpp"
#include "knowcat/error.hpp"
#include "knowcat/report.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace knowcat;

  CLI::App app{"Knowledge-category evaluation harness"};
  app.set_version_flag("--version", std::string(KNOWCAT_VERSION));
  app.require_subcommand(1);

  // sample
  SampleOptions sample;
  std::string sample_mode = "internal", sample_style = "direct";
  std::size_t subset = 0;
  auto* cmd_sample_app = app.add_subcommand("sample", "Collect greedy + sampled responses");
  cmd_sample_app->add_option("--dataset", sample.dataset, "Line-delimited QA dataset")->required();
  cmd_sample_app->add_option("--answer-key", sample.format.answer_key, "Gold answer field name")
      ->capture_default_str();
  auto* subset_opt = cmd_sample_app->add_option("--subset", subset, "Records to sample (default 3000)");
  cmd_sample_app->add_option("--seed", sample.seed, "Subset sampling seed")->capture_default_str();
  cmd_sample_app->add_flag("--dedup", sample.dedup, "Drop records with a repeated question");
  cmd_sample_app->add_option("--model", sample.model_id, "Model id sent to the backend");
  cmd_sample_app->add_option("--endpoint", sample.endpoint,
                             "Chat-completion endpoint URL (credential from $KNOWCAT_API_KEY)");
  cmd_sample_app->add_option("--mock", sample.mock, "Mock model spec file (offline backend)");
  cmd_sample_app->add_option("--mock-seed", sample.mock_seed, "Seed for mock draws")
      ->capture_default_str();
  cmd_sample_app->add_option("--mode", sample_mode, "internal | external")
      ->check(CLI::IsMember({"internal", "external"}))->capture_default_str();
  cmd_sample_app->add_option("--style", sample_style, "direct | cot")
      ->check(CLI::IsMember({"direct", "cot"}))->capture_default_str();
  cmd_sample_app->add_option("--template", sample.template_path,
                             "Prompt template file with {question}/{knowledge}");
  cmd_sample_app->add_option("--n", sample.n_total, "Generations per question (1 greedy + n-1 sampled)")
      ->capture_default_str();
  cmd_sample_app->add_option("--temperature", sample.temperature, "Sampling temperature")
      ->capture_default_str();
  cmd_sample_app->add_option("--max-tokens", sample.max_tokens, "Generation length cap")
      ->capture_default_str();
  cmd_sample_app->add_option("--concurrency", sample.concurrency, "Requests in flight")
      ->capture_default_str();
  cmd_sample_app->add_option("--retries", sample.max_attempts, "Attempts per generation")
      ->capture_default_str();
  cmd_sample_app->add_option("--retry-base-ms", sample.retry_base_ms, "Initial backoff")
      ->capture_default_str();
  cmd_sample_app->add_option("--out-dir", sample.out_dir, "Snapshot directory")->required();

  // classify
  ClassifyOptions classify;
  std::string classify_style;
  auto* cmd_classify_app = app.add_subcommand("classify", "Classify a snapshot and write metrics");
  cmd_classify_app->add_option("--snapshot", classify.snapshot, "Snapshot directory")->required();
  cmd_classify_app->add_option("--dataset", classify.dataset, "Gold answers (default: from manifest)");
  cmd_classify_app->add_option("--answer-key", classify.format.answer_key, "Gold answer field name")
      ->capture_default_str();
  cmd_classify_app->add_option("--style", classify_style, "Override answer extraction style")
      ->check(CLI::IsMember({"direct", "cot"}));
  cmd_classify_app->add_option("--out-dir", classify.out_dir, "Report directory (default: snapshot)");
  cmd_classify_app->add_flag("--svg", classify.svg, "Also write a stacked-bar SVG");

  // compare
  CompareOptions compare;
  auto* cmd_compare_app = app.add_subcommand("compare", "Transition report between two classifications");
  cmd_compare_app->add_option("--base", compare.base, "Earlier classification.jsonl")->required();
  cmd_compare_app->add_option("--target", compare.target, "Later classification.jsonl")->required();
  cmd_compare_app->add_option("--out-dir", compare.out_dir, "Report directory")->required();

  // layers
  LayersOptions layers;
  auto* cmd_layers_app = app.add_subcommand("layers", "Layer x category heatmap from a probe export");
  cmd_layers_app->add_option("--export", layers.export_path, "Layer export file")->required();
  cmd_layers_app->add_option("--classification", layers.classification, "classification.jsonl")
      ->required();
  cmd_layers_app->add_option("--out-dir", layers.out_dir, "Report directory")->required();
  cmd_layers_app->add_flag("--svg", layers.svg, "Also write a heatmap SVG");

  // track
  TrackOptions track;
  auto* cmd_track_app = app.add_subcommand("track", "Accuracy / score / ratio series over steps");
  cmd_track_app->add_option("files", track.files, "Classification files in step order")->required();
  cmd_track_app->add_option("--labels", track.labels, "Step labels, one per file")->delimiter(',');
  cmd_track_app->add_option("--out-dir", track.out_dir, "Report directory")->required();
  cmd_track_app->add_flag("--svg", track.svg, "Also write a stacked-bar SVG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*cmd_sample_app) {
      sample.mode = parse_prompt_mode(sample_mode);
      sample.style = parse_prompt_style(sample_style);
      if (*subset_opt) sample.subset = subset;
      const auto summary = cmd_sample(sample, std::cout);
      return summary.ok() ? 0 : kExitRuntime;
    }
    if (*cmd_classify_app) {
      if (!classify_style.empty()) classify.style = parse_prompt_style(classify_style);
      cmd_classify(classify, std::cout);
    } else if (*cmd_compare_app) {
      cmd_compare(compare, std::cout);
    } else if (*cmd_layers_app) {
      cmd_layers(layers, std::cout);
    } else if (*cmd_track_app) {
      cmd_track(track, std::cerr);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
