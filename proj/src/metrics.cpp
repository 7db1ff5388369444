#include "knowcat/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "knowcat/error.hpp"

namespace knowcat {

double accuracy(const std::vector<ClassificationResult>& results) {
  if (results.empty()) throw Error("accuracy of an empty result set");
  const auto correct = std::count_if(results.begin(), results.end(),
                                     [](const auto& r) { return r.greedy_correct; });
  return static_cast<double>(correct) / static_cast<double>(results.size());
}

CategoryDistribution CategoryDistribution::from_ratios(
    const std::array<double, kNumCategories>& ratios) {
  CategoryDistribution d;
  d.ratios = ratios;
  return d;
}

CategoryDistribution category_distribution(
    const std::vector<ClassificationResult>& results) {
  if (results.empty()) throw Error("category distribution of an empty result set");
  CategoryDistribution d;
  for (const auto& r : results) ++d.counts[slot_of(r.category)];
  d.total = results.size();
  for (std::size_t i = 0; i < kNumCategories; ++i) {
    d.ratios[i] = static_cast<double>(d.counts[i]) / static_cast<double>(d.total);
  }
  return d;
}

double category_score(const CategoryDistribution& distribution) {
  double score = 0.0;
  for (Category c : kAllCategories) {
    score += category_weight(c) * distribution.ratio(c);
  }
  return score;
}

std::vector<LayerExportRecord> read_layer_export(std::istream& in,
                                                 std::string_view source) {
  std::vector<LayerExportRecord> out;
  const std::string src(source);
  for_each_line(in, [&](std::size_t line, std::string_view text) {
    if (is_blank(text)) return;
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ParseError(src, line, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(src, line, "expected a JSON object");
    auto field = [&](const char* key) -> const Json& {
      auto it = j.find(key);
      if (it == j.end() || it->is_null()) {
        throw ParseError(src, line, std::string("missing field \"") + key + "\"");
      }
      return *it;
    };
    LayerExportRecord rec;
    const Json& qid = field("question_id");
    if (qid.is_string()) {
      rec.question_id = qid.get<std::string>();
    } else if (qid.is_number_integer()) {
      rec.question_id = std::to_string(qid.get<long long>());
    } else {
      throw ParseError(src, line, "question_id must be a string or integer");
    }
    const Json& layer = field("layer");
    if (!layer.is_number_integer() || layer.get<long long>() < 0) {
      throw ParseError(src, line, "layer must be a non-negative integer");
    }
    rec.layer = layer.get<int>();
    const Json& p = field("p_truth");
    if (!p.is_number()) throw ParseError(src, line, "p_truth must be a number");
    rec.p_truth = p.get<double>();
    if (!(rec.p_truth >= 0.0 && rec.p_truth <= 1.0)) {
      throw ParseError(src, line, "p_truth outside [0, 1]");
    }
    const Json& model = field("model_id");
    const Json& fp = field("prompt_fingerprint");
    if (!model.is_string() || !fp.is_string()) {
      throw ParseError(src, line, "model_id and prompt_fingerprint must be strings");
    }
    rec.model_id = model.get<std::string>();
    rec.prompt_fingerprint = fp.get<std::string>();
    out.push_back(std::move(rec));
  });
  return out;
}

std::vector<LayerExportRecord> load_layer_export(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open layer export " + path);
  return read_layer_export(in, path);
}

LayerHeatmap layer_heatmap(const std::vector<LayerExportRecord>& records,
                           const std::vector<ClassificationResult>& results) {
  if (records.empty()) throw Error("layer export is empty");

  std::unordered_map<std::string, Category> category_by_id;
  for (const auto& r : results) category_by_id.emplace(r.record_id, r.category);

  // Layer coverage per question, keyed in a sorted map for stable messages.
  std::map<std::string, std::set<int>> layers_by_question;
  for (const auto& rec : records) {
    if (!category_by_id.contains(rec.question_id)) {
      throw Error("layer export references unknown question \"" +
                  rec.question_id + "\"");
    }
    if (!(rec.p_truth >= 0.0 && rec.p_truth <= 1.0)) {
      throw Error("p_truth outside [0, 1] for question \"" + rec.question_id + "\"");
    }
    if (!layers_by_question[rec.question_id].insert(rec.layer).second) {
      throw Error("question \"" + rec.question_id + "\" repeats layer " +
                  std::to_string(rec.layer));
    }
  }

  int layer_count = -1;
  for (const auto& [qid, layers] : layers_by_question) {
    const int count = static_cast<int>(layers.size());
    if (*layers.rbegin() != count - 1) {
      throw Error("question \"" + qid + "\" has non-contiguous layers");
    }
    if (layer_count < 0) {
      layer_count = count;
    } else if (count != layer_count) {
      throw Error("inconsistent layer counts: question \"" + qid + "\" has " +
                  std::to_string(count) + ", expected " +
                  std::to_string(layer_count));
    }
  }

  const auto rows = static_cast<std::size_t>(layer_count);
  std::vector<std::array<double, kNumCategories>> sums(rows);
  LayerHeatmap heatmap;
  heatmap.layer_count = layer_count;
  heatmap.cells.resize(rows);
  heatmap.support.resize(rows);
  for (auto& row : sums) row.fill(0.0);
  for (auto& row : heatmap.support) row.fill(0);

  for (const auto& rec : records) {
    const auto slot = slot_of(category_by_id.at(rec.question_id));
    const auto layer = static_cast<std::size_t>(rec.layer);
    sums[layer][slot] += rec.p_truth;
    ++heatmap.support[layer][slot];
  }
  for (std::size_t l = 0; l < rows; ++l) {
    for (std::size_t c = 0; c < kNumCategories; ++c) {
      if (heatmap.support[l][c] > 0) {
        heatmap.cells[l][c] =
            sums[l][c] / static_cast<double>(heatmap.support[l][c]);
      }
    }
  }
  return heatmap;
}

}  // namespace knowcat
