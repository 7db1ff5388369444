#include <cmath>
#include <fstream>

#include "knowcat/hashing.hpp"
#include "knowcat/sampler.hpp"

namespace knowcat {
namespace {

constexpr std::string_view kDrawToken = "{draw}";

// Uniform in [0, 1) from the leading 64 bits of
// SHA-256("<seed>:<record id>:<draw index>").
double keyed_uniform(std::uint64_t seed, std::string_view record_id,
                     std::size_t draw_index) {
  std::string key = std::to_string(seed);
  key += ':';
  key += record_id;
  key += ':';
  key += std::to_string(draw_index);
  const std::uint64_t bits = std::stoull(sha256_hex(key).substr(0, 16), nullptr, 16);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::string expand_draw(std::string answer, std::size_t draw_index) {
  for (auto pos = answer.find(kDrawToken); pos != std::string::npos;
       pos = answer.find(kDrawToken, pos)) {
    const auto replacement = std::to_string(draw_index);
    answer.replace(pos, kDrawToken.size(), replacement);
    pos += replacement.size();
  }
  return answer;
}

}  // namespace

void MockModelSpec::validate() const {
  for (const auto& [id, rec] : records) {
    if (rec.distribution.empty()) {
      throw Error("mock spec for \"" + id + "\" has an empty distribution");
    }
    double sum = 0.0;
    for (const auto& a : rec.distribution) {
      if (!(a.p >= 0.0)) {
        throw Error("mock spec for \"" + id + "\" has a negative probability");
      }
      sum += a.p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error("mock spec for \"" + id + "\" sums to " + std::to_string(sum) +
                  ", expected 1");
    }
  }
}

MockModelSpec MockModelSpec::parse(std::istream& in, std::uint64_t seed,
                                   std::string_view source) {
  MockModelSpec spec;
  spec.seed = seed;
  for_each_line(in, [&](std::size_t line, std::string_view text) {
    if (is_blank(text)) return;
    try {
      const Json j = Json::parse(text);
      MockRecordSpec rec;
      const auto id = j.at("record_id").is_string()
                          ? j.at("record_id").get<std::string>()
                          : std::to_string(j.at("record_id").get<long long>());
      rec.greedy = j.at("greedy").get<std::string>();
      for (const auto& entry : j.at("distribution")) {
        rec.distribution.push_back(
            {entry.at("answer").get<std::string>(), entry.at("p").get<double>()});
      }
      if (!spec.records.emplace(id, std::move(rec)).second) {
        throw ParseError(std::string(source), line,
                         "duplicate record_id \"" + id + "\"");
      }
    } catch (const Json::exception& e) {
      throw ParseError(std::string(source), line, e.what());
    }
  });
  spec.validate();
  return spec;
}

MockModelSpec MockModelSpec::load(const std::string& path, std::uint64_t seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open mock spec " + path);
  return parse(in, seed, path);
}

std::string mock_generate(std::string_view record_id, double temperature,
                          const MockModelSpec& spec, std::size_t draw_index) {
  const auto it = spec.records.find(std::string(record_id));
  if (it == spec.records.end()) {
    throw Error("mock spec has no entry for record \"" + std::string(record_id) +
                "\"");
  }
  const MockRecordSpec& rec = it->second;
  if (temperature <= 0.0) return rec.greedy;

  const double u = keyed_uniform(spec.seed, record_id, draw_index);
  double cumulative = 0.0;
  for (const auto& a : rec.distribution) {
    cumulative += a.p;
    if (u < cumulative) return expand_draw(a.answer, draw_index);
  }
  // Rounding left u above the accumulated mass; take the last positive entry.
  for (auto a = rec.distribution.rbegin(); a != rec.distribution.rend(); ++a) {
    if (a->p > 0.0) return expand_draw(a->answer, draw_index);
  }
  return expand_draw(rec.distribution.back().answer, draw_index);
}

MockBackend::MockBackend(MockModelSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
}

std::string MockBackend::generate(const GenerationRequest& request) {
  ++calls_;
  return mock_generate(request.record_id, request.temperature, spec_,
                       request.draw_index);
}

}  // namespace knowcat
