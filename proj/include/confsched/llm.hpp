#pragma once

// Chat-model integration: prompt construction, transport (live HTTP or
// offline replay), the zero-shot scheduling loop, title-only clustering,
// and instance downsampling for papers-per-session sweeps.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "confsched/core.hpp"
#include "confsched/ingest.hpp"
#include "confsched/metrics.hpp"

namespace confsched {

struct ChatRequest {
  std::string model_name = "gpt-4";
  double temperature = 0.8;
  std::string prompt;
  int max_retries = 3;  // total attempt budget, not extra attempts
};

class TransportError : public Error {
 public:
  using Error::Error;
};

struct TranscriptEntry {
  // ISO-8601 UTC; empty for deterministic clients so runs stay byte-stable.
  std::string timestamp;
  std::string prompt;
  std::string response;
  int attempt = 0;    // 1-based
  std::string error;  // transport failure message, empty on success
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Returns the raw response text or throws TransportError.
  virtual std::string send(const ChatRequest& request) = 0;
  // Deterministic clients answer identical prompts identically.
  virtual bool deterministic() const { return false; }
};

// Serves canned responses from `{sha256(prompt)}.txt` files in a directory.
class ReplayClient : public ChatClient {
 public:
  explicit ReplayClient(std::string directory);
  std::string send(const ChatRequest& request) override;
  bool deterministic() const override { return true; }
  // Writes the response file a later send() would pick up. Fixture helper.
  void record(const std::string& prompt, const std::string& response) const;
  std::string response_path(const std::string& prompt) const;

 private:
  std::string directory_;
};

struct HttpEndpoint {
  std::string url;      // e.g. https://api.example.com/v1/chat/completions
  std::string api_key;  // bearer token; empty sends no Authorization header
};

// POSTs {model, temperature, messages} and extracts the first message
// content from the response body.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(HttpEndpoint endpoint);
  std::string send(const ChatRequest& request) override;

 private:
  HttpEndpoint endpoint_;
};

// Lowercase hex digest; keys the replay store.
std::string sha256_hex(const std::string& text);

// Thrown when the attempt budget is spent; carries the exchanges made.
class LlmRunError : public Error {
 public:
  LlmRunError(const std::string& message, std::vector<TranscriptEntry> transcript,
              bool transport);
  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }
  bool transport() const { return transport_; }  // distinguishes exit codes

 private:
  std::vector<TranscriptEntry> transcript_;
  bool transport_ = false;
};

// Templates also ship as resources/*.txt; a test keeps them in sync.
extern const std::string kSchedulePromptTemplate;
extern const std::string kClusterPromptTemplate;

// Instantiates the schedule template: session table in instance order,
// paper table in seeded-shuffled order. Same seed, same bytes.
std::string build_schedule_prompt(const Instance& instance, std::uint64_t seed);

// Title-only clustering prompt asking for `title@cluster` rows with
// cluster in 0..k-1.
std::string build_cluster_prompt(const std::vector<Paper>& papers, int k,
                                 std::uint64_t seed);

struct ZeroShotResult {
  // Absent only when every attempt lacked a fenced block.
  std::optional<Schedule> schedule;
  std::vector<RawScheduleRow> rows;
  std::vector<ParseDefect> defects;
  ResolutionReport resolution;
  ViolationReport violations;  // populated even on defective responses
  std::vector<TranscriptEntry> transcript;
  bool unparseable = false;
  int attempts = 0;
};

// Builds the prompt (request.prompt is overwritten), sends, parses the
// fenced block, resolves titles and scores violations. Responses with no
// fence are retried with the identical prompt up to request.max_retries
// attempts; exhaustion yields an unparseable result with every paper
// counted missing. Transport errors consume attempts too; exhausting the
// budget on them throws LlmRunError.
ZeroShotResult zero_shot_schedule(const Instance& instance, ChatClient& client,
                                  ChatRequest request, std::uint64_t seed);

struct LlmClusterResult {
  Labeling labeling;  // total over the input papers, labels in 0..k-1
  // Papers absent from the response, placed in the largest returned cluster.
  std::vector<std::string> repaired_papers;
  std::vector<TranscriptEntry> transcript;
  int attempts = 0;
};

// Clusters by paper title alone. Rows with labels outside 0..k-1 are
// rejected; their papers count as omitted and are repaired like the rest.
// Unparseable responses after retries throw LlmRunError.
LlmClusterResult llm_cluster(const std::vector<Paper>& papers, int k,
                             ChatClient& client, ChatRequest request,
                             std::uint64_t seed);

struct DownsampledInstance {
  Instance instance;
  Schedule reference;  // the input reference restricted to kept papers
};

// Keeps a seeded uniform sample of min(papers_per_session, population)
// papers in each reference session and rescales session lengths so the
// slack fraction is preserved (ceiled; sessions with no reference papers
// keep their length). Papers outside the reference are dropped.
DownsampledInstance downsample(const Instance& instance, const Schedule& reference,
                               int papers_per_session, std::uint64_t seed);

// One JSON object per line: {timestamp, prompt, response, attempt} plus
// error when non-empty.
std::string transcript_to_jsonl(const std::vector<TranscriptEntry>& transcript);

}  // namespace confsched
