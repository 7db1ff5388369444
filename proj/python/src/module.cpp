#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <iostream>
#include <sstream>

#include "knowcat/classifier.hpp"
#include "knowcat/metrics.hpp"
#include "knowcat/report.hpp"
#include "knowcat/transitions.hpp"

namespace py = pybind11;
using namespace knowcat;

namespace {

PromptStyle style_arg(const std::string& s) { return parse_prompt_style(s); }

py::dict result_dict(const ClassificationResult& r) {
  py::dict d;
  d["record_id"] = r.record_id;
  d["category"] = std::string(code_of(r.category));
  d["index"] = index_of(r.category);
  d["greedy_correct"] = r.greedy_correct;
  d["sample_correct_count"] = r.sample_correct_count;
  d["correctness_probability"] = r.correctness_probability;
  d["confidence"] = r.confidence ? py::cast(*r.confidence) : py::none();
  return d;
}

py::dict ratios_dict(const TransitionRatios& r) {
  py::dict d;
  d["upgrade"] = r.upgrade;
  d["downgrade"] = r.downgrade;
  d["stable"] = r.stable;
  return d;
}

TransitionMatrix matrix_from(const std::vector<std::vector<std::size_t>>& counts) {
  if (counts.size() != kNumCategories) throw UsageError("transition matrix must be 6x6");
  TransitionMatrix m;
  for (std::size_t i = 0; i < kNumCategories; ++i) {
    if (counts[i].size() != kNumCategories) throw UsageError("transition matrix must be 6x6");
    for (std::size_t j = 0; j < kNumCategories; ++j) {
      m.counts[i][j] = counts[i][j];
      m.total += counts[i][j];
    }
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Knowledge-category evaluation: classification, metrics and run reports.";
  m.attr("__version__") = KNOWCAT_VERSION;

  // Translators run newest first, so the subclass is registered last.
  py::register_exception<Error>(m, "KnowcatError", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  m.def("normalize_answer", [](const std::string& s) { return normalize_answer(s); });
  m.def("extract_final_answer", [](const std::string& s) { return extract_final_answer(s); });
  m.def(
      "is_correct",
      [](const std::string& response, const std::string& gold, const std::string& style) {
        return is_correct(response, gold, style_arg(style));
      },
      py::arg("response"), py::arg("gold"), py::arg("style") = "direct");

  m.def(
      "confidence",
      [](const std::vector<std::string>& answers, const std::string& style) {
        return confidence(ResponseHistogram::from_answers(answers, style_arg(style)));
      },
      py::arg("answers"), py::arg("style") = "direct",
      "Largest share of identical normalized answers among the sampled responses.");

  m.def(
      "classify",
      [](const std::string& greedy, const std::vector<std::string>& sampled,
         const std::string& gold, const std::string& style, const std::string& record_id) {
        ResponseSet set;
        set.record_id = record_id;
        set.greedy = greedy;
        set.sampled = sampled;
        return result_dict(classify(set, gold, style_arg(style)));
      },
      py::arg("greedy"), py::arg("sampled"), py::arg("gold"), py::arg("style") = "direct",
      py::arg("record_id") = "");

  m.def(
      "category_score",
      [](const std::array<double, kNumCategories>& ratios) {
        return category_score(CategoryDistribution::from_ratios(ratios));
      },
      py::arg("ratios"));

  m.def(
      "transition_ratios",
      [](const std::vector<std::vector<std::size_t>>& counts) {
        return ratios_dict(transition_ratios(matrix_from(counts)));
      },
      py::arg("counts"), "Overall upgrade/downgrade/stable shares of a 6x6 count matrix.");

  m.def(
      "classify_snapshot",
      [](const std::filesystem::path& snapshot, const std::string& dataset,
         const std::filesystem::path& out_dir) {
        ClassifyOptions o;
        o.snapshot = snapshot;
        o.dataset = dataset;
        o.out_dir = out_dir;
        std::ostringstream log;
        const auto out = cmd_classify(o, log);
        py::dict d;
        d["n_records"] = out.results.size();
        d["accuracy"] = out.accuracy;
        d["category_score"] = out.score;
        d["ratios"] = out.distribution.ratios;
        return d;
      },
      py::arg("snapshot"), py::arg("dataset") = "", py::arg("out_dir") = std::filesystem::path());

  m.def(
      "compare",
      [](const std::string& base, const std::string& target, const std::filesystem::path& out_dir) {
        std::ostringstream log;
        return ratios_dict(transition_ratios(cmd_compare({base, target, out_dir}, log)));
      },
      py::arg("base"), py::arg("target"), py::arg("out_dir"));

  m.def(
      "sample_mock",
      [](const std::string& dataset, const std::string& mock, const std::filesystem::path& out_dir,
         std::size_t n_total, std::uint64_t mock_seed, std::optional<std::size_t> subset,
         std::uint64_t seed) {
        SampleOptions o;
        o.dataset = dataset;
        o.mock = mock;
        o.out_dir = out_dir;
        o.n_total = n_total;
        o.mock_seed = mock_seed;
        o.subset = subset;
        o.seed = seed;
        std::ostringstream log;
        const auto s = cmd_sample(o, log);
        py::dict d;
        d["total"] = s.total;
        d["cached"] = s.cached;
        d["queried"] = s.queried;
        d["failures"] = s.failures.size();
        return d;
      },
      py::arg("dataset"), py::arg("mock"), py::arg("out_dir"), py::arg("n_total") = 7,
      py::arg("mock_seed") = 0, py::arg("subset") = py::none(), py::arg("seed") = 0,
      "Collect a response snapshot from a mock model spec.");
}
