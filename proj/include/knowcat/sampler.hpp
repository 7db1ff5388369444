#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "knowcat/dataset.hpp"
#include "knowcat/error.hpp"
#include "knowcat/jsonl.hpp"
#include "knowcat/manifest.hpp"

namespace knowcat {

// Protocol knobs for one sampling run. One greedy generation plus
// n_total - 1 sampled generations per record.
struct SamplingConfig {
  std::size_t n_total = 7;
  double temperature = 1.0;  // sampled pass only; greedy always uses 0
  int max_tokens = 64;
  std::string model_id;
  std::string dataset_id;
  PromptSpec prompt;

  std::size_t sample_count() const { return n_total - 1; }

  // Throws UsageError for n_total < 3 or a non-positive temperature.
  void validate() const;

  // Digest of (dataset id, model id, mode, style, n_total, temperature,
  // template hash). Cache entries with a different fingerprint are stale.
  std::string fingerprint() const;
};

// All generations collected for one record. Stored raw, before any answer
// normalization.
struct ResponseSet {
  std::string record_id;
  std::string greedy;
  std::vector<std::string> sampled;
  std::string fingerprint;
  std::string started_at;
  std::string finished_at;

  OrderedJson to_json() const;
  // Throws Error when a field is missing or has the wrong type.
  static ResponseSet from_json(const Json& j);

  bool operator==(const ResponseSet&) const = default;
};

struct GenerationRequest {
  std::string_view record_id;
  std::string_view prompt;
  double temperature = 0.0;
  int max_tokens = 0;
  std::size_t draw_index = 0;  // position within the sampled list
};

class BackendError : public Error {
 public:
  BackendError(const std::string& what, bool retryable)
      : Error(what), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

// A text generator. Implementations must tolerate concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string generate(const GenerationRequest& request) = 0;
  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// Deterministic offline backend.

struct MockAnswer {
  std::string answer;
  double p = 0.0;
};

struct MockRecordSpec {
  std::string greedy;
  std::vector<MockAnswer> distribution;
};

// Per-record answer behaviour. An answer containing "{draw}" has that token
// replaced by the draw index, which yields a different answer on every draw.
struct MockModelSpec {
  std::unordered_map<std::string, MockRecordSpec> records;
  std::uint64_t seed = 0;

  // Throws Error when a distribution is empty, has a negative mass or does
  // not sum to 1 within 1e-9.
  void validate() const;

  // One JSON object per line: {record_id, greedy, distribution: [{answer, p}]}.
  static MockModelSpec parse(std::istream& in, std::uint64_t seed,
                             std::string_view source = "<mock>");
  static MockModelSpec load(const std::string& path, std::uint64_t seed);
};

// Temperature 0 returns the greedy answer. Otherwise a categorical draw whose
// uniform variate is a pure function of (seed, record id, draw index).
std::string mock_generate(std::string_view record_id, double temperature,
                          const MockModelSpec& spec, std::size_t draw_index);

class MockBackend final : public Backend {
 public:
  explicit MockBackend(MockModelSpec spec);

  std::string generate(const GenerationRequest& request) override;
  std::string name() const override { return "mock"; }

  std::size_t calls() const { return calls_.load(); }

 private:
  MockModelSpec spec_;
  std::atomic<std::size_t> calls_{0};
};

// ---------------------------------------------------------------------------
// Chat-completion style HTTP backend.

inline constexpr const char* kApiKeyEnv = "KNOWCAT_API_KEY";

struct HttpBackendConfig {
  std::string endpoint;  // e.g. "https://api.example.com/v1/chat/completions"
  std::string model_id;
  std::string api_key;   // sent as a bearer token when non-empty
  std::chrono::seconds timeout{120};
};

class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  // Throws BackendError. 429 and 5xx responses and transport failures are
  // retryable; other statuses are not.
  std::string generate(const GenerationRequest& request) override;
  std::string name() const override { return "http"; }

  // Request body for one single-turn generation.
  static Json make_request_body(std::string_view model_id,
                                const GenerationRequest& request);
  // Extracts choices[0].message.content.
  static std::string parse_response_body(std::string_view body);

 private:
  HttpBackendConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

// ---------------------------------------------------------------------------
// Collection.

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{30000};

  // Exponential backoff with full jitter for the given 1-based attempt.
  std::chrono::milliseconds delay_for(int attempt) const;
};

// Thrown when a record could not be completed within the retry budget.
class CollectionError : public Error {
 public:
  CollectionError(std::string record_id, int attempts, const std::string& cause);
  const std::string& record_id() const { return record_id_; }
  int attempts() const { return attempts_; }

 private:
  std::string record_id_;
  int attempts_;
};

inline constexpr const char* kResponsesFile = "responses.jsonl";
inline constexpr const char* kFailuresFile = "failures.jsonl";

// Line-delimited response store for one snapshot. Loading is lenient:
// lines that fail to parse, have the wrong sample count or a foreign
// fingerprint are dropped, which discards bundles cut short by a crash.
class ResponseCache {
 public:
  ResponseCache(std::filesystem::path file, std::string fingerprint,
                std::size_t sample_count);

  std::optional<ResponseSet> find(const std::string& record_id) const;

  // Appends one complete bundle and flushes it. Thread-safe.
  void store(const ResponseSet& set);

  // Rewrites the file atomically with the entries for `order`, in that order.
  void finalize(const std::vector<std::string>& order);

  std::size_t size() const;

 private:
  std::filesystem::path file_;
  std::string fingerprint_;
  std::size_t sample_count_;
  mutable std::mutex mutex_;
  std::map<std::string, ResponseSet> entries_;
  bool unterminated_ = false;  // file ends mid-line; next append starts fresh
};

// Returns the cached bundle when present; otherwise issues one greedy and
// n_total - 1 sampled generations in order, stores the bundle and returns it.
// Nothing is stored unless every generation succeeded.
ResponseSet collect_responses(const QARecord& record,
                              const SamplingConfig& config, Backend& backend,
                              ResponseCache* cache = nullptr,
                              const RetryPolicy& retry = {});

struct RecordFailure {
  std::string record_id;
  int attempts = 0;
  std::string message;
};

struct SnapshotOptions {
  std::filesystem::path dir;
  std::size_t concurrency = 4;  // max generations in flight
  RetryPolicy retry;
};

struct SnapshotSummary {
  std::filesystem::path dir;
  std::size_t total = 0;
  std::size_t cached = 0;
  std::size_t queried = 0;
  std::vector<RecordFailure> failures;

  bool ok() const { return failures.empty(); }
};

// Collects a bundle for every record using a bounded worker pool. Records
// already in the cache are skipped, so an interrupted run resumes. Writes
// responses.jsonl (record order), failures.jsonl and manifest.json.
SnapshotSummary run_snapshot(const std::vector<QARecord>& records,
                             const SamplingConfig& config, Backend& backend,
                             const SnapshotOptions& options,
                             RunManifest manifest = {});

// A finished snapshot as read back for classification.
struct Snapshot {
  std::filesystem::path dir;
  std::optional<RunManifest> manifest;
  std::vector<ResponseSet> responses;
};

// Strict loader: a corrupted line raises ParseError naming the line.
Snapshot load_snapshot(const std::filesystem::path& dir);

}  // namespace knowcat
