#include "knowcat/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <unordered_set>

#include "knowcat/error.hpp"
#include "knowcat/hashing.hpp"
#include "knowcat/jsonl.hpp"

namespace knowcat {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string required_text(const Json& obj, const std::string& key,
                          std::string_view source, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw ParseError(std::string(source), line, "missing field \"" + key + "\"");
  }
  if (!it->is_string()) {
    throw ParseError(std::string(source), line,
                     "field \"" + key + "\" must be a string");
  }
  auto value = it->get<std::string>();
  if (trim(value).empty()) {
    throw ParseError(std::string(source), line,
                     "field \"" + key + "\" is empty");
  }
  return value;
}

// Uniform double in [0, 1) from the top 53 bits, independent of the
// standard library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

std::vector<QARecord> parse_dataset(std::istream& in, const DatasetFormat& format,
                                    std::string_view source) {
  std::vector<QARecord> records;
  std::unordered_set<std::string> seen;
  for_each_line(in, [&](std::size_t line, std::string_view text) {
    if (is_blank(text)) return;
    Json obj;
    try {
      obj = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ParseError(std::string(source), line,
                       std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) {
      throw ParseError(std::string(source), line, "expected a JSON object");
    }

    QARecord rec;
    auto id_it = obj.find(format.id_key);
    if (id_it == obj.end() || id_it->is_null()) {
      rec.id = std::to_string(line);
    } else if (id_it->is_string()) {
      rec.id = id_it->get<std::string>();
    } else if (id_it->is_number_integer()) {
      rec.id = std::to_string(id_it->get<long long>());
    } else {
      throw ParseError(std::string(source), line,
                       "field \"" + format.id_key + "\" must be a string or integer");
    }
    rec.question = required_text(obj, format.question_key, source, line);
    rec.gold = required_text(obj, format.answer_key, source, line);
    auto k_it = obj.find(format.knowledge_key);
    if (k_it != obj.end() && !k_it->is_null()) {
      if (!k_it->is_string()) {
        throw ParseError(std::string(source), line,
                         "field \"" + format.knowledge_key + "\" must be a string");
      }
      rec.knowledge = k_it->get<std::string>();
    }

    if (!seen.insert(rec.id).second) {
      throw Error(std::string(source) + ":" + std::to_string(line) +
                  ": duplicate record id \"" + rec.id + "\"");
    }
    records.push_back(std::move(rec));
  });
  return records;
}

std::vector<QARecord> load_dataset(const std::string& path,
                                   const DatasetFormat& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset " + path);
  return parse_dataset(in, format, path);
}

void serialize_dataset(const std::vector<QARecord>& records, std::ostream& out,
                       const DatasetFormat& format) {
  for (const auto& rec : records) {
    OrderedJson j;
    j[format.id_key] = rec.id;
    j[format.question_key] = rec.question;
    if (rec.knowledge) j[format.knowledge_key] = *rec.knowledge;
    j[format.answer_key] = rec.gold;
    out << j.dump() << '\n';
  }
}

std::vector<QARecord> sample_subset(const std::vector<QARecord>& records,
                                    std::size_t k, std::uint64_t seed) {
  const std::size_t n = records.size();
  if (k > n) {
    throw Error("subset size " + std::to_string(k) + " exceeds dataset size " +
                std::to_string(n));
  }
  std::vector<QARecord> out;
  out.reserve(k);
  if (k == n) {
    out = records;
    return out;
  }
  // Selection sampling: each record is kept with probability
  // (still needed) / (still available), which yields a uniform k-subset
  // already in input order.
  std::mt19937_64 rng(seed);
  std::size_t needed = k;
  for (std::size_t i = 0; i < n && needed > 0; ++i) {
    const auto remaining = static_cast<double>(n - i);
    if (remaining * unit_uniform(rng) < static_cast<double>(needed)) {
      out.push_back(records[i]);
      --needed;
    }
  }
  return out;
}

std::vector<QARecord> dedup_by_question(const std::vector<QARecord>& records) {
  std::vector<QARecord> out;
  std::unordered_set<std::string> seen;
  for (const auto& rec : records) {
    if (seen.insert(std::string(trim(rec.question))).second) out.push_back(rec);
  }
  return out;
}

std::string_view to_string(PromptMode mode) {
  return mode == PromptMode::kInternal ? "internal" : "external";
}

std::string_view to_string(PromptStyle style) {
  return style == PromptStyle::kDirect ? "direct" : "cot";
}

PromptMode parse_prompt_mode(std::string_view text) {
  if (text == "internal") return PromptMode::kInternal;
  if (text == "external") return PromptMode::kExternal;
  throw UsageError("unknown mode \"" + std::string(text) +
                   "\" (expected internal or external)");
}

PromptStyle parse_prompt_style(std::string_view text) {
  if (text == "direct") return PromptStyle::kDirect;
  if (text == "cot") return PromptStyle::kCot;
  throw UsageError("unknown style \"" + std::string(text) +
                   "\" (expected direct or cot)");
}

PromptSpec PromptSpec::make_default(PromptMode mode, PromptStyle style) {
  PromptSpec spec;
  spec.mode = mode;
  spec.style = style;
  std::string text;
  text = style == PromptStyle::kDirect
             ? "Answer the following question with a short answer"
             : "Answer the following question";
  if (mode == PromptMode::kExternal) {
    text += ", using the provided knowledge.\nKnowledge: {knowledge}\n";
  } else {
    text += ".\n";
  }
  text += "Question: {question}";
  if (style == PromptStyle::kDirect) text += "\nAnswer:";
  spec.template_text = std::move(text);
  return spec;
}

void PromptSpec::validate() const {
  const auto questions = count_occurrences(template_text, kQuestionPlaceholder);
  if (questions != 1) {
    throw Error("prompt template must contain {question} exactly once (found " +
                std::to_string(questions) + ")");
  }
  const bool has_knowledge =
      count_occurrences(template_text, kKnowledgePlaceholder) > 0;
  if (mode == PromptMode::kExternal && !has_knowledge) {
    throw Error("external-mode prompt template is missing {knowledge}");
  }
  if (mode == PromptMode::kInternal && has_knowledge) {
    throw Error("internal-mode prompt template must not reference {knowledge}");
  }
}

std::string PromptSpec::fingerprint() const {
  std::string buf;
  auto add = [&buf](std::string_view part) {
    buf += std::to_string(part.size());
    buf += ':';
    buf += part;
  };
  add(to_string(mode));
  add(to_string(style));
  add(template_text);
  if (style == PromptStyle::kCot) {
    add(reasoning_cue);
    add(answer_instruction);
  }
  return sha256_hex(buf);
}

PromptSpec load_prompt_spec(const std::string& path, PromptMode mode,
                            PromptStyle style) {
  PromptSpec spec = PromptSpec::make_default(mode, style);
  spec.template_text = read_file(path);
  while (!spec.template_text.empty() &&
         (spec.template_text.back() == '\n' || spec.template_text.back() == '\r')) {
    spec.template_text.pop_back();
  }
  spec.validate();
  return spec;
}

std::string render_prompt(const QARecord& record, const PromptSpec& spec) {
  spec.validate();
  if (spec.mode == PromptMode::kExternal && !record.knowledge) {
    throw Error("record \"" + record.id +
                "\" has no knowledge text for external mode");
  }
  const std::string_view tpl = spec.template_text;
  std::string out;
  out.reserve(tpl.size() + record.question.size() +
              (record.knowledge ? record.knowledge->size() : 0));
  std::size_t i = 0;
  while (i < tpl.size()) {
    const auto rest = tpl.substr(i);
    if (rest.starts_with(kQuestionPlaceholder)) {
      out += record.question;
      i += kQuestionPlaceholder.size();
    } else if (rest.starts_with(kKnowledgePlaceholder)) {
      out += *record.knowledge;
      i += kKnowledgePlaceholder.size();
    } else {
      out += tpl[i++];
    }
  }
  if (spec.style == PromptStyle::kCot) {
    out += '\n';
    out += spec.reasoning_cue;
    out += ' ';
    out += spec.answer_instruction;
  }
  return out;
}

}  // namespace knowcat
