#include "knowcat/sampler.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "knowcat/hashing.hpp"

namespace knowcat {

void SamplingConfig::validate() const {
  if (n_total < 3) {
    throw UsageError("n_total must be at least 3 (got " +
                     std::to_string(n_total) + ")");
  }
  if (!(temperature > 0.0)) {
    throw UsageError("sampling temperature must be positive");
  }
  if (max_tokens <= 0) throw UsageError("max_tokens must be positive");
  prompt.validate();
}

std::string SamplingConfig::fingerprint() const {
  OrderedJson key;
  key["dataset_id"] = dataset_id;
  key["model_id"] = model_id;
  key["mode"] = std::string(to_string(prompt.mode));
  key["style"] = std::string(to_string(prompt.style));
  key["n_total"] = n_total;
  key["temperature"] = temperature;
  key["template_hash"] = prompt.fingerprint();
  return sha256_hex(key.dump());
}

OrderedJson ResponseSet::to_json() const {
  OrderedJson j;
  j["record_id"] = record_id;
  j["greedy"] = greedy;
  j["sampled"] = sampled;
  j["fingerprint"] = fingerprint;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  return j;
}

ResponseSet ResponseSet::from_json(const Json& j) {
  try {
    ResponseSet s;
    s.record_id = j.at("record_id").get<std::string>();
    s.greedy = j.at("greedy").get<std::string>();
    s.sampled = j.at("sampled").get<std::vector<std::string>>();
    s.fingerprint = j.at("fingerprint").get<std::string>();
    s.started_at = j.at("started_at").get<std::string>();
    s.finished_at = j.at("finished_at").get<std::string>();
    return s;
  } catch (const Json::exception& e) {
    throw Error(std::string("invalid response set: ") + e.what());
  }
}

std::chrono::milliseconds RetryPolicy::delay_for(int attempt) const {
  if (base_delay.count() <= 0) return std::chrono::milliseconds(0);
  const int shift = std::clamp(attempt - 1, 0, 30);
  const auto ceiling =
      std::min<long long>(max_delay.count(), base_delay.count() << shift);
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uniform_int_distribution<long long> jitter(0, ceiling);
  return std::chrono::milliseconds(jitter(rng));
}

CollectionError::CollectionError(std::string record_id, int attempts,
                                 const std::string& cause)
    : Error("record \"" + record_id + "\" failed after " +
            std::to_string(attempts) + " attempt(s): " + cause),
      record_id_(std::move(record_id)),
      attempts_(attempts) {}

// ---------------------------------------------------------------------------

ResponseCache::ResponseCache(std::filesystem::path file, std::string fingerprint,
                             std::size_t sample_count)
    : file_(std::move(file)),
      fingerprint_(std::move(fingerprint)),
      sample_count_(sample_count) {
  std::ifstream in(file_, std::ios::binary);
  if (!in) return;
  in.seekg(0, std::ios::end);
  if (in.tellg() > 0) {
    in.seekg(-1, std::ios::end);
    unterminated_ = in.get() != '\n';
  }
  in.seekg(0, std::ios::beg);
  for_each_line(in, [&](std::size_t, std::string_view line) {
    if (is_blank(line)) return;
    try {
      auto set = ResponseSet::from_json(Json::parse(line));
      if (set.fingerprint != fingerprint_ || set.sampled.size() != sample_count_) {
        return;
      }
      entries_[set.record_id] = std::move(set);
    } catch (const std::exception&) {
      // truncated or corrupt line: the bundle is re-collected
    }
  });
}

std::optional<ResponseSet> ResponseCache::find(const std::string& record_id) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(record_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::store(const ResponseSet& set) {
  if (set.sampled.size() != sample_count_ || set.fingerprint != fingerprint_) {
    throw Error("refusing to cache an incomplete bundle for \"" + set.record_id +
                "\"");
  }
  const auto line = set.to_json().dump() + "\n";
  std::lock_guard lock(mutex_);
  if (file_.has_parent_path()) {
    std::filesystem::create_directories(file_.parent_path());
  }
  std::ofstream out(file_, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot append to " + file_.string());
  if (unterminated_) {
    out << '\n';
    unterminated_ = false;
  }
  out << line;
  out.flush();
  entries_[set.record_id] = set;
}

void ResponseCache::finalize(const std::vector<std::string>& order) {
  std::ostringstream ss;
  std::lock_guard lock(mutex_);
  for (const auto& id : order) {
    auto it = entries_.find(id);
    if (it != entries_.end()) ss << it->second.to_json().dump() << '\n';
  }
  write_file_atomic(file_, ss.str());
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

// ---------------------------------------------------------------------------

namespace {

std::string generate_with_retry(Backend& backend, const GenerationRequest& request,
                                const RetryPolicy& retry) {
  const int budget = std::max(1, retry.max_attempts);
  for (int attempt = 1;; ++attempt) {
    try {
      return backend.generate(request);
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= budget) {
        throw CollectionError(std::string(request.record_id), attempt, e.what());
      }
    } catch (const std::exception& e) {
      throw CollectionError(std::string(request.record_id), attempt, e.what());
    }
    std::this_thread::sleep_for(retry.delay_for(attempt));
  }
}

}  // namespace

ResponseSet collect_responses(const QARecord& record, const SamplingConfig& config,
                              Backend& backend, ResponseCache* cache,
                              const RetryPolicy& retry) {
  const auto fingerprint = config.fingerprint();
  if (cache) {
    if (auto hit = cache->find(record.id)) return *hit;
  }

  const std::string prompt = render_prompt(record, config.prompt);
  ResponseSet set;
  set.record_id = record.id;
  set.fingerprint = fingerprint;
  set.started_at = iso_timestamp_now();

  GenerationRequest request;
  request.record_id = record.id;
  request.prompt = prompt;
  request.max_tokens = config.max_tokens;
  request.temperature = 0.0;
  request.draw_index = 0;
  set.greedy = generate_with_retry(backend, request, retry);

  request.temperature = config.temperature;
  set.sampled.reserve(config.sample_count());
  for (std::size_t draw = 0; draw < config.sample_count(); ++draw) {
    request.draw_index = draw;
    set.sampled.push_back(generate_with_retry(backend, request, retry));
  }
  set.finished_at = iso_timestamp_now();

  if (cache) cache->store(set);
  return set;
}

SnapshotSummary run_snapshot(const std::vector<QARecord>& records,
                             const SamplingConfig& config, Backend& backend,
                             const SnapshotOptions& options, RunManifest manifest) {
  config.validate();
  if (options.dir.empty()) throw UsageError("snapshot directory is required");
  std::filesystem::create_directories(options.dir);

  SnapshotSummary summary;
  summary.dir = options.dir;
  summary.total = records.size();

  manifest.started_at = iso_timestamp_now();
  manifest.model_id = config.model_id;
  manifest.backend = backend.name();
  manifest.mode = config.prompt.mode;
  manifest.style = config.prompt.style;
  manifest.template_hash = config.prompt.fingerprint();
  manifest.n_total = config.n_total;
  manifest.temperature = config.temperature;
  manifest.max_tokens = config.max_tokens;
  manifest.config_fingerprint = config.fingerprint();
  manifest.subset_size = records.size();

  ResponseCache cache(options.dir / kResponsesFile, manifest.config_fingerprint,
                      config.sample_count());

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (cache.find(records[i].id)) {
      ++summary.cached;
    } else {
      pending.push_back(i);
    }
  }
  summary.queried = pending.size();

  std::vector<std::optional<RecordFailure>> failures(records.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t slot = next++; slot < pending.size(); slot = next++) {
      const auto& rec = records[pending[slot]];
      try {
        collect_responses(rec, config, backend, &cache, options.retry);
      } catch (const CollectionError& e) {
        failures[pending[slot]] = RecordFailure{rec.id, e.attempts(), e.what()};
      } catch (const std::exception& e) {
        failures[pending[slot]] = RecordFailure{rec.id, 0, e.what()};
      }
    }
  };

  const std::size_t workers =
      std::min(std::max<std::size_t>(1, options.concurrency), pending.size());
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }

  std::vector<std::string> order;
  order.reserve(records.size());
  for (const auto& rec : records) order.push_back(rec.id);
  cache.finalize(order);

  std::ostringstream failure_lines;
  for (auto& f : failures) {
    if (!f) continue;
    OrderedJson j;
    j["record_id"] = f->record_id;
    j["attempts"] = f->attempts;
    j["error"] = f->message;
    failure_lines << j.dump() << '\n';
    summary.failures.push_back(std::move(*f));
  }
  write_file_atomic(options.dir / kFailuresFile, failure_lines.str());

  manifest.finished_at = iso_timestamp_now();
  write_manifest(options.dir, manifest);
  return summary;
}

Snapshot load_snapshot(const std::filesystem::path& dir) {
  Snapshot snap;
  snap.dir = dir;
  snap.manifest = read_manifest(dir);
  const auto path = dir / kResponsesFile;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("no response cache at " + path.string());

  std::set<std::string> seen;
  for_each_line(in, [&](std::size_t line, std::string_view text) {
    if (is_blank(text)) return;
    ResponseSet set;
    try {
      set = ResponseSet::from_json(Json::parse(text));
    } catch (const std::exception& e) {
      throw ParseError(path.string(), line, e.what());
    }
    if (snap.manifest) {
      if (set.fingerprint != snap.manifest->config_fingerprint) {
        throw ParseError(path.string(), line,
                         "fingerprint does not match the run manifest");
      }
      if (set.sampled.size() + 1 != snap.manifest->n_total) {
        throw ParseError(path.string(), line,
                         "expected " + std::to_string(snap.manifest->n_total - 1) +
                             " sampled responses, found " +
                             std::to_string(set.sampled.size()));
      }
    }
    if (set.sampled.size() < 2) {
      throw ParseError(path.string(), line, "fewer than 2 sampled responses");
    }
    if (!seen.insert(set.record_id).second) {
      throw ParseError(path.string(), line,
                       "duplicate record_id \"" + set.record_id + "\"");
    }
    snap.responses.push_back(std::move(set));
  });
  return snap;
}

}  // namespace knowcat
