#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace knowcat {

// One evaluation item.
struct QARecord {
  std::string id;
  std::string question;
  std::optional<std::string> knowledge;  // the annotated knowledge point
  std::string gold;

  bool operator==(const QARecord&) const = default;
};

// Field names used when reading a line-delimited dataset. The defaults match
// the HaluEval QA layout except for the answer key, which HaluEval calls
// "right_answer".
struct DatasetFormat {
  std::string id_key = "id";
  std::string question_key = "question";
  std::string knowledge_key = "knowledge";
  std::string answer_key = "answer";
};

// Parses one JSON object per line. Blank lines are skipped; a record without
// an explicit id gets its 1-based physical line number as id.
// Throws ParseError on a malformed line, Error on a duplicate id.
std::vector<QARecord> parse_dataset(std::istream& in,
                                    const DatasetFormat& format = {},
                                    std::string_view source = "<dataset>");

std::vector<QARecord> load_dataset(const std::string& path,
                                   const DatasetFormat& format = {});

// Writes records with explicit ids so a re-parse yields identical records.
void serialize_dataset(const std::vector<QARecord>& records, std::ostream& out,
                       const DatasetFormat& format = {});

// Uniform sample of k records without replacement. Output keeps the input's
// relative order and depends only on (records, k, seed).
std::vector<QARecord> sample_subset(const std::vector<QARecord>& records,
                                    std::size_t k, std::uint64_t seed);

// Keeps the first record for each distinct (trimmed) question text.
std::vector<QARecord> dedup_by_question(const std::vector<QARecord>& records);

enum class PromptMode { kInternal, kExternal };
enum class PromptStyle { kDirect, kCot };

std::string_view to_string(PromptMode mode);
std::string_view to_string(PromptStyle style);
PromptMode parse_prompt_mode(std::string_view text);
PromptStyle parse_prompt_style(std::string_view text);

inline constexpr std::string_view kQuestionPlaceholder = "{question}";
inline constexpr std::string_view kKnowledgePlaceholder = "{knowledge}";
inline constexpr std::string_view kAnswerMarker = "Answer:";

struct PromptSpec {
  PromptMode mode = PromptMode::kInternal;
  PromptStyle style = PromptStyle::kDirect;
  std::string template_text;
  // Appended after the template for the cot style.
  std::string reasoning_cue = "Let's think step by step.";
  std::string answer_instruction =
      "After your reasoning, finish with a final line of the form "
      "\"Answer: <final answer>\".";

  // Built-in template for the given mode and style.
  static PromptSpec make_default(PromptMode mode, PromptStyle style);

  // Throws Error when the template violates the mode's placeholder rules.
  void validate() const;

  // Stable digest over everything that affects the rendered prompt.
  std::string fingerprint() const;
};

// Reads a template from a plain-text file; cue and instruction keep the
// defaults for `style`.
PromptSpec load_prompt_spec(const std::string& path, PromptMode mode,
                            PromptStyle style);

// Substitutes placeholders in a single pass, so text inserted for one
// placeholder is never scanned for another.
std::string render_prompt(const QARecord& record, const PromptSpec& spec);

}  // namespace knowcat
