#include "knowcat/report.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "knowcat/jsonl.hpp"
#include "test_util.hpp"

namespace knowcat {
namespace {

namespace fs = std::filesystem;
using knowcat::testing::data_dir;
using knowcat::testing::TempDir;

fs::path golden() { return data_dir() / "golden"; }

void expect_same_file(const fs::path& actual, const fs::path& expected) {
  ASSERT_TRUE(fs::exists(actual)) << actual;
  EXPECT_EQ(read_file(actual), read_file(expected)) << actual << " vs " << expected;
}

ClassifyOutcome classify_golden(const std::string& run, const fs::path& out) {
  ClassifyOptions o;
  o.snapshot = golden() / run;
  o.dataset = (golden() / "dataset.jsonl").string();
  o.out_dir = out;
  std::ostringstream log;
  return cmd_classify(o, log);
}

TEST(Golden, ClassifyBaseAndCot) {
  TempDir tmp;
  for (const std::string run : {"base", "cot"}) {
    classify_golden(run, tmp / run);
    for (const char* f : {kClassificationFile, kMetricsFile, kCategoryBarsCsv}) {
      expect_same_file(tmp / run / f, golden() / "expected" / run / f);
    }
  }
}

TEST(Golden, ClassifyOutcomeNumbers) {
  TempDir tmp;
  const auto out = classify_golden("base", tmp.path());
  EXPECT_EQ(out.results.size(), 10u);
  EXPECT_DOUBLE_EQ(out.accuracy, 0.4);
  EXPECT_NEAR(out.score, 3.6, 1e-12);
}

TEST(Golden, Compare) {
  TempDir tmp;
  classify_golden("base", tmp / "base");
  classify_golden("cot", tmp / "cot");
  CompareOptions o{(tmp / "base" / kClassificationFile).string(),
                   (tmp / "cot" / kClassificationFile).string(), tmp / "cmp"};
  std::ostringstream log;
  const auto m = cmd_compare(o, log);
  EXPECT_EQ(m.total, 10u);
  const auto r = transition_ratios(m);
  EXPECT_DOUBLE_EQ(r.upgrade, 0.6);
  EXPECT_DOUBLE_EQ(r.downgrade, 0.2);
  EXPECT_DOUBLE_EQ(r.stable, 0.2);
  expect_same_file(tmp / "cmp" / kTransitionsFile, golden() / "expected/compare" / kTransitionsFile);
  expect_same_file(tmp / "cmp" / kTransitionBarsCsv, golden() / "expected/compare" / kTransitionBarsCsv);
}

TEST(Golden, Layers) {
  TempDir tmp;
  classify_golden("base", tmp / "base");
  LayersOptions o;
  o.export_path = (golden() / "layers/export.jsonl").string();
  o.classification = (tmp / "base" / kClassificationFile).string();
  o.out_dir = tmp / "layers";
  o.svg = true;
  std::ostringstream log;
  const auto h = cmd_layers(o, log);
  EXPECT_EQ(h.layer_count, 4);
  expect_same_file(tmp / "layers" / kHeatmapFile, golden() / "expected/layers" / kHeatmapFile);
  expect_same_file(tmp / "layers" / kHeatmapCsv, golden() / "expected/layers" / kHeatmapCsv);
  EXPECT_TRUE(fs::exists(tmp / "layers" / kHeatmapSvg));
}

TEST(Report, RerunsAreByteIdentical) {
  TempDir tmp;
  for (int i = 0; i < 2; ++i) {
    const auto dir = tmp / ("run" + std::to_string(i));
    classify_golden("base", dir / "base");
    classify_golden("cot", dir / "cot");
    std::ostringstream log;
    cmd_compare({(dir / "base" / kClassificationFile).string(),
                 (dir / "cot" / kClassificationFile).string(), dir / "cmp"},
                log);
  }
  for (const std::string f : {std::string("base/") + kClassificationFile,
                              std::string("base/") + kMetricsFile,
                              std::string("cot/") + kCategoryBarsCsv,
                              std::string("cmp/") + kTransitionsFile,
                              std::string("cmp/") + kTransitionBarsCsv}) {
    EXPECT_EQ(read_file(tmp / "run0" / f), read_file(tmp / "run1" / f)) << f;
  }
}

TEST(Track, ThreeSteps) {
  TempDir tmp;
  classify_golden("base", tmp / "base");
  classify_golden("cot", tmp / "cot");
  const auto base = (tmp / "base" / kClassificationFile).string();
  const auto cot = (tmp / "cot" / kClassificationFile).string();
  TrackOptions o{{base, cot, base}, {"s1", "s2", "s3"}, tmp / "track", true};
  std::ostringstream log;
  const auto points = cmd_track(o, log);
  ASSERT_EQ(points.size(), 3u);
  EXPECT_DOUBLE_EQ(points[0].accuracy, 0.4);
  EXPECT_EQ(points[0].label, "s1");
  const auto report = Json::parse(read_file(tmp / "track" / kTrackFile));
  ASSERT_EQ(report.at("transitions").size(), 2u);
  EXPECT_DOUBLE_EQ(report["transitions"][0]["overall"]["upgrade"].get<double>(), 0.6);
  EXPECT_DOUBLE_EQ(report["transitions"][1]["overall"]["downgrade"].get<double>(), 0.6);
  EXPECT_TRUE(fs::exists(tmp / "track" / "transitions_step1_step2.json"));
  EXPECT_TRUE(fs::exists(tmp / "track" / "transitions_step2_step3.json"));
  EXPECT_TRUE(fs::exists(tmp / "track" / kTrackSvg));
}

TEST(Track, IdenticalStepsAreStable) {
  TempDir tmp;
  classify_golden("base", tmp / "base");
  const auto base = (tmp / "base" / kClassificationFile).string();
  std::ostringstream log;
  cmd_track({{base, base}, {}, tmp / "track", false}, log);
  const auto report = Json::parse(read_file(tmp / "track" / kTrackFile));
  EXPECT_EQ(report["transitions"][0]["overall"]["stable"].get<double>(), 1.0);
  EXPECT_EQ(report["steps"][0]["label"], base);
}

TEST(Track, NeedsTwoFiles) {
  TempDir tmp;
  std::ostringstream log;
  EXPECT_THROW(cmd_track({{"a"}, {}, tmp.path(), false}, log), UsageError);
}

TEST(Classify, CorruptCacheLineIsNamed) {
  TempDir tmp;
  fs::copy(golden() / "base", tmp / "snap");
  {
    std::ofstream out(tmp / "snap" / kResponsesFile, std::ios::app);
    out << "{garbage\n";
  }
  ClassifyOptions o;
  o.snapshot = tmp / "snap";
  o.dataset = (golden() / "dataset.jsonl").string();
  std::ostringstream log;
  try {
    cmd_classify(o, log);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 11u);
    EXPECT_NE(std::string(e.what()).find(":11:"), std::string::npos);
  }
}

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p);
  for (const auto& l : lines) out << l << '\n';
}

TEST(Sample, MockAllGoldEndToEnd) {
  TempDir tmp;
  std::vector<std::string> data, mock;
  for (int i = 1; i <= 20; ++i) {
    const auto id = "r" + std::to_string(i);
    data.push_back(Json{{"id", id}, {"question", "Q" + id + "?"}, {"answer", "A" + id}}.dump());
    mock.push_back(Json{{"record_id", id},
                        {"greedy", "A" + id},
                        {"distribution", {{{"answer", "A" + id}, {"p", 1.0}}}}}
                       .dump());
  }
  write_lines(tmp / "data.jsonl", data);
  write_lines(tmp / "mock.jsonl", mock);

  SampleOptions s;
  s.dataset = (tmp / "data.jsonl").string();
  s.mock = (tmp / "mock.jsonl").string();
  s.out_dir = tmp / "snap";
  std::ostringstream log;
  const auto summary = cmd_sample(s, log);
  EXPECT_TRUE(summary.ok());
  EXPECT_EQ(summary.total, 20u);
  EXPECT_NE(log.str().find("using all of them"), std::string::npos);

  ClassifyOptions c;
  c.snapshot = tmp / "snap";
  const auto out = cmd_classify(c, log);  // dataset taken from the manifest
  EXPECT_EQ(out.accuracy, 1.0);
  EXPECT_EQ(out.score, 6.0);
  EXPECT_EQ(out.distribution.counts[0], 20u);

  s.subset = 21;
  EXPECT_THROW(cmd_sample(s, log), Error);
}

TEST(Sample, UsageErrors) {
  TempDir tmp;
  std::ostringstream log;
  SampleOptions s;
  EXPECT_THROW(cmd_sample(s, log), UsageError);
  s.dataset = (tmp / "missing.jsonl").string();
  s.out_dir = tmp / "out";
  s.mock = "m.jsonl";
  EXPECT_THROW(cmd_sample(s, log), UsageError);
  s.endpoint = "http://localhost:1/v1/chat/completions";
  EXPECT_THROW(cmd_sample(s, log), UsageError);
}

#ifdef KNOWCAT_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + KNOWCAT_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  TempDir tmp;
  const auto out = (tmp / "out").string();
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("sample --dataset /nonexistent.jsonl --mock x --out-dir " + out), 2);
  EXPECT_EQ(run_cli("sample --out-dir " + out), 2);
  EXPECT_EQ(run_cli("bogus-subcommand"), 2);
  EXPECT_EQ(run_cli("classify --snapshot " + (tmp / "nothing").string() + " --dataset " +
                    (golden() / "dataset.jsonl").string()),
            1);
  EXPECT_EQ(run_cli("classify --snapshot " + (golden() / "base").string() + " --dataset " +
                    (golden() / "dataset.jsonl").string() + " --out-dir " + out),
            0);
  EXPECT_EQ(read_file(tmp / "out" / kMetricsFile),
            read_file(golden() / "expected/base" / kMetricsFile));
}
#endif

}  // namespace
}  // namespace knowcat
