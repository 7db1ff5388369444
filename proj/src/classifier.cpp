#include "knowcat/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

#include "knowcat/error.hpp"

namespace knowcat {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_punct(char c) {
  return static_cast<unsigned char>(c) < 0x80 &&
         std::ispunct(static_cast<unsigned char>(c));
}

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view strip_punct(std::string_view s) {
  while (!s.empty() && (is_ascii_punct(s.front()) || is_space(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (is_ascii_punct(s.back()) || is_space(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::string_view first_nonempty_line(std::string_view s) {
  while (!s.empty()) {
    const auto nl = s.find('\n');
    const auto line = trim_view(s.substr(0, nl));
    if (!line.empty()) return line;
    if (nl == std::string_view::npos) break;
    s.remove_prefix(nl + 1);
  }
  return {};
}

}  // namespace

std::string normalize_answer(std::string_view text) {
  // lowercase + collapse whitespace runs into single spaces
  std::string collapsed;
  collapsed.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) {
      collapsed.push_back(' ');
      pending_space = false;
    }
    const auto uc = static_cast<unsigned char>(c);
    collapsed.push_back(uc < 0x80 ? static_cast<char>(std::tolower(uc)) : c);
  }

  std::string_view view = strip_punct(collapsed);
  for (std::string_view article : {"a ", "an ", "the "}) {
    if (view.starts_with(article)) {
      view.remove_prefix(article.size());
      view = strip_punct(view);
      break;
    }
  }
  return std::string(view);
}

std::string extract_final_answer(std::string_view response) {
  const auto marker = response.rfind(kAnswerMarker);
  if (marker != std::string_view::npos) {
    return std::string(
        first_nonempty_line(response.substr(marker + kAnswerMarker.size())));
  }
  std::string_view last;
  std::string_view rest = response;
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    const auto line = trim_view(rest.substr(0, nl));
    if (!line.empty()) last = line;
    if (nl == std::string_view::npos) break;
    rest.remove_prefix(nl + 1);
  }
  return std::string(last);
}

std::string canonical_answer(std::string_view response, PromptStyle style) {
  if (style == PromptStyle::kCot) {
    return normalize_answer(extract_final_answer(response));
  }
  return normalize_answer(response);
}

bool is_correct(std::string_view response, std::string_view gold,
                PromptStyle style) {
  return canonical_answer(response, style) == normalize_answer(gold);
}

ResponseHistogram ResponseHistogram::from_answers(
    const std::vector<std::string>& answers, PromptStyle style) {
  ResponseHistogram h;
  for (const auto& a : answers) ++h.counts[canonical_answer(a, style)];
  h.total = answers.size();
  return h;
}

std::size_t ResponseHistogram::max_count() const {
  std::size_t best = 0;
  for (const auto& [answer, n] : counts) best = std::max(best, n);
  return best;
}

double confidence(const ResponseHistogram& histogram) {
  if (histogram.total < 2) {
    throw Error("confidence needs at least 2 sampled responses (got " +
                std::to_string(histogram.total) + ")");
  }
  return static_cast<double>(histogram.max_count()) /
         static_cast<double>(histogram.total);
}

ClassificationResult classify(const ResponseSet& responses, std::string_view gold,
                              PromptStyle style) {
  const std::size_t m = responses.sampled.size();
  if (m < 2) {
    throw Error("record \"" + responses.record_id +
                "\": classification needs at least 2 sampled responses");
  }
  const std::string gold_norm = normalize_answer(gold);

  ClassificationResult r;
  r.record_id = responses.record_id;
  r.greedy_correct = canonical_answer(responses.greedy, style) == gold_norm;
  r.histogram = ResponseHistogram::from_answers(responses.sampled, style);
  auto hit = r.histogram.counts.find(gold_norm);
  r.sample_correct_count = hit == r.histogram.counts.end() ? 0 : hit->second;
  r.correctness_probability =
      static_cast<double>(r.sample_correct_count + (r.greedy_correct ? 1 : 0)) /
      static_cast<double>(m + 1);

  const std::size_t k = r.sample_correct_count;
  if (r.greedy_correct) {
    r.category = k == m ? Category::kHighlyKnown : Category::kMaybeKnown;
  } else if (k >= 1) {
    r.category = Category::kWeaklyKnown;
  } else {
    const double conf = confidence(r.histogram);
    const std::size_t f = r.histogram.max_count();
    r.confidence = conf;
    if (f == 1) {
      r.category = Category::kUnconfidentUnknown;
    } else if (f == m) {
      r.category = Category::kConfidentUnknown;
    } else {
      r.category = Category::kMayConfidentUnknown;
    }
  }
  return r;
}

std::vector<ClassificationResult> classify_snapshot(
    const std::vector<ResponseSet>& responses,
    const std::unordered_map<std::string, std::string>& gold, PromptStyle style) {
  std::vector<ClassificationResult> results;
  results.reserve(responses.size());
  for (const auto& set : responses) {
    auto it = gold.find(set.record_id);
    if (it == gold.end()) {
      throw Error("no gold answer for record \"" + set.record_id + "\"");
    }
    results.push_back(classify(set, it->second, style));
  }
  return results;
}

std::unordered_map<std::string, std::string> gold_map(
    const std::vector<QARecord>& records) {
  std::unordered_map<std::string, std::string> gold;
  gold.reserve(records.size());
  for (const auto& r : records) gold.emplace(r.id, r.gold);
  return gold;
}

OrderedJson ClassificationResult::to_json() const {
  OrderedJson j;
  j["record_id"] = record_id;
  j["category_code"] = std::string(code_of(category));
  j["greedy_correct"] = greedy_correct;
  j["sample_correct_count"] = sample_correct_count;
  j["correctness_probability"] = round4(correctness_probability);
  if (confidence) j["confidence"] = round4(*confidence);
  return j;
}

ClassificationResult ClassificationResult::from_json(const Json& j) {
  ClassificationResult r;
  try {
    r.record_id = j.at("record_id").get<std::string>();
    const auto code = j.at("category_code").get<std::string>();
    auto cat = parse_category(code);
    if (!cat) throw Error("unknown category code \"" + code + "\"");
    r.category = *cat;
    r.greedy_correct = j.at("greedy_correct").get<bool>();
    r.sample_correct_count = j.at("sample_correct_count").get<std::size_t>();
    r.correctness_probability = j.at("correctness_probability").get<double>();
    if (auto it = j.find("confidence"); it != j.end() && !it->is_null()) {
      r.confidence = it->get<double>();
    }
  } catch (const Json::exception& e) {
    throw Error(e.what());
  }
  const bool known = is_known(r.category);
  if (known == r.confidence.has_value()) {
    throw Error("confidence must be present exactly for unknown categories");
  }
  const bool greedy_category = index_of(r.category) <= 2;
  if (r.greedy_correct != greedy_category) {
    throw Error("greedy_correct disagrees with category " +
                std::string(label_of(r.category)));
  }
  return r;
}

void write_classification(const std::vector<ClassificationResult>& results,
                          std::ostream& out) {
  for (const auto& r : results) out << r.to_json().dump() << '\n';
}

std::vector<ClassificationResult> read_classification(std::istream& in,
                                                      std::string_view source) {
  std::vector<ClassificationResult> results;
  std::unordered_set<std::string> seen;
  for_each_line(in, [&](std::size_t line, std::string_view text) {
    if (is_blank(text)) return;
    ClassificationResult r;
    try {
      r = ClassificationResult::from_json(Json::parse(text));
    } catch (const std::exception& e) {
      throw ParseError(std::string(source), line, e.what());
    }
    if (!seen.insert(r.record_id).second) {
      throw ParseError(std::string(source), line,
                       "duplicate record_id \"" + r.record_id + "\"");
    }
    results.push_back(std::move(r));
  });
  return results;
}

std::vector<ClassificationResult> load_classification(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open classification file " + path);
  return read_classification(in, path);
}

}  // namespace knowcat
