#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "knowcat/category.hpp"
#include "knowcat/dataset.hpp"
#include "knowcat/jsonl.hpp"
#include "knowcat/sampler.hpp"

namespace knowcat {

// Lowercase, trim, collapse internal whitespace, strip surrounding
// punctuation and drop a leading "a", "an" or "the".
std::string normalize_answer(std::string_view text);

// Text after the last "Answer:" marker (to the end of that line); falls back
// to the last non-empty line when no marker is present.
std::string extract_final_answer(std::string_view response);

// Applies CoT extraction for the cot style, then normalizes.
std::string canonical_answer(std::string_view response, PromptStyle style);

bool is_correct(std::string_view response, std::string_view gold,
                PromptStyle style = PromptStyle::kDirect);

// Multiplicity of each normalized answer over the sampled responses.
struct ResponseHistogram {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;

  static ResponseHistogram from_answers(const std::vector<std::string>& answers,
                                        PromptStyle style = PromptStyle::kDirect);
  std::size_t max_count() const;
};

// Largest answer frequency divided by the number of samples.
// Throws Error when fewer than two samples are present.
double confidence(const ResponseHistogram& histogram);

struct ClassificationResult {
  std::string record_id;
  Category category = Category::kHighlyKnown;
  bool greedy_correct = false;
  std::size_t sample_correct_count = 0;
  double correctness_probability = 0.0;  // correct responses / n
  std::optional<double> confidence;      // unknown categories only
  ResponseHistogram histogram;

  // Report line; the histogram is not serialized.
  OrderedJson to_json() const;
  static ClassificationResult from_json(const Json& j);
};

ClassificationResult classify(const ResponseSet& responses,
                              std::string_view gold,
                              PromptStyle style = PromptStyle::kDirect);

// One result per response set, in snapshot order. Throws Error naming the
// record when a gold answer is missing.
std::vector<ClassificationResult> classify_snapshot(
    const std::vector<ResponseSet>& responses,
    const std::unordered_map<std::string, std::string>& gold,
    PromptStyle style = PromptStyle::kDirect);

std::unordered_map<std::string, std::string> gold_map(
    const std::vector<QARecord>& records);

void write_classification(const std::vector<ClassificationResult>& results,
                          std::ostream& out);
std::vector<ClassificationResult> read_classification(
    std::istream& in, std::string_view source = "<classification>");
std::vector<ClassificationResult> load_classification(const std::string& path);

}  // namespace knowcat
