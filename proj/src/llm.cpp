#include "confsched/llm.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstddef>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "confsched/prompts.hpp"
#include "confsched/rng.hpp"

namespace confsched {
namespace {

using nlohmann::json;

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

// Left-aligned columns with a two-space gutter. The last column is not
// padded, so no line carries trailing whitespace.
std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += row[c];
      if (c + 1 < row.size()) out.append(width[c] - row[c].size() + 2, ' ');
    }
    out += '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  if (!out.empty()) out.pop_back();  // the template supplies the line break
  return out;
}

std::string iso_utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SeededRng rng(seed);
  rng.shuffle(order);
  return order;
}

struct ChatOutcome {
  std::string response;  // first response containing a fence
  std::string fenced;
  bool parseable = false;
  int attempts = 0;
};

// Sends with the identical prompt until a fenced block comes back or the
// attempt budget runs out. Transport failures consume attempts; spending
// the whole budget on them throws.
ChatOutcome run_chat(ChatClient& client, const ChatRequest& request,
                     std::vector<TranscriptEntry>& transcript) {
  ChatOutcome outcome;
  const int budget = std::max(1, request.max_retries);
  for (int attempt = 1; attempt <= budget; ++attempt) {
    outcome.attempts = attempt;
    TranscriptEntry entry;
    entry.prompt = request.prompt;
    entry.attempt = attempt;
    if (!client.deterministic()) entry.timestamp = iso_utc_now();
    try {
      entry.response = client.send(request);
    } catch (const TransportError& error) {
      entry.error = error.what();
      transcript.push_back(entry);
      if (attempt == budget)
        throw LlmRunError("transport failed on all " + std::to_string(budget) +
                              " attempts: " + error.what(),
                          transcript, /*transport=*/true);
      continue;
    }
    transcript.push_back(entry);
    if (auto fenced = extract_fenced_block(entry.response)) {
      outcome.response = entry.response;
      outcome.fenced = *fenced;
      outcome.parseable = true;
      return outcome;
    }
  }
  return outcome;
}

struct ClusterRow {
  std::string title;
  int label = 0;
};

// `title@cluster` lines, split on the last '@' so titles containing '@'
// survive. Keeps only rows whose label parses and lies in 0..k-1; the
// caller treats everything else as omitted.
std::vector<ClusterRow> parse_cluster_rows(const std::string& fenced, int k) {
  std::vector<ClusterRow> rows;
  std::istringstream lines(fenced);
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && line == "title@cluster") {
      first = false;
      continue;
    }
    first = false;
    const std::size_t at = line.rfind('@');
    if (at == std::string::npos || at == 0) continue;
    int label = 0;
    const char* begin = line.data() + at + 1;
    const char* end = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(begin, end, label);
    if (ec != std::errc() || ptr != end) continue;
    if (label < 0 || label >= k) continue;
    rows.push_back({line.substr(0, at), label});
  }
  return rows;
}

}  // namespace

const std::string kSchedulePromptTemplate = generated::kSchedulePromptResource;
const std::string kClusterPromptTemplate = generated::kClusterPromptResource;

LlmRunError::LlmRunError(const std::string& message, std::vector<TranscriptEntry> transcript,
                         bool transport)
    : Error(message), transcript_(std::move(transcript)), transport_(transport) {}

std::string sha256_hex(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 digest failed");
  static const char* kHexDigits = "0123456789abcdef";
  std::string hex(static_cast<std::size_t>(length) * 2, '0');
  for (unsigned int i = 0; i < length; ++i) {
    hex[2 * i] = kHexDigits[digest[i] >> 4];
    hex[2 * i + 1] = kHexDigits[digest[i] & 0x0f];
  }
  return hex;
}

ReplayClient::ReplayClient(std::string directory) : directory_(std::move(directory)) {}

std::string ReplayClient::response_path(const std::string& prompt) const {
  return (std::filesystem::path(directory_) / (sha256_hex(prompt) + ".txt")).string();
}

std::string ReplayClient::send(const ChatRequest& request) {
  const std::string path = response_path(request.prompt);
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw TransportError("no recorded response at " + path +
                         " (files are named by the sha256 of the prompt)");
  std::ostringstream content;
  content << in.rdbuf();
  return content.str();
}

void ReplayClient::record(const std::string& prompt, const std::string& response) const {
  std::filesystem::create_directories(directory_);
  const std::string path = response_path(prompt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << response;
  if (!out) throw Error("cannot write " + path);
}

HttpChatClient::HttpChatClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

std::string HttpChatClient::send(const ChatRequest& request) {
  const std::string& url = endpoint_.url;
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw TransportError("endpoint URL lacks a scheme: " + url);
  const std::size_t path_start = url.find('/', scheme_end + 3);
  const std::string base = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(30, 0);
  client.set_read_timeout(300, 0);
  httplib::Headers headers;
  if (!endpoint_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + endpoint_.api_key);

  const json body = {
      {"model", request.model_name},
      {"temperature", request.temperature},
      {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
  };
  httplib::Result result = client.Post(path, headers, body.dump(), "application/json");
  if (!result)
    throw TransportError("POST " + url + " failed: " + httplib::to_string(result.error()));
  if (result->status < 200 || result->status >= 300)
    throw TransportError("POST " + url + " returned HTTP " + std::to_string(result->status));

  const json reply = json::parse(result->body, nullptr, false);
  if (!reply.is_discarded()) {
    if (reply.contains("choices") && reply["choices"].is_array() && !reply["choices"].empty()) {
      const json& first = reply["choices"][0];
      if (first.contains("message") && first["message"].contains("content") &&
          first["message"]["content"].is_string())
        return first["message"]["content"].get<std::string>();
    }
    if (reply.contains("content") && reply["content"].is_string())
      return reply["content"].get<std::string>();
  }
  throw TransportError("response from " + url + " carries no message content");
}

std::string build_schedule_prompt(const Instance& instance, std::uint64_t seed) {
  std::vector<std::vector<std::string>> session_rows;
  for (const Session& session : instance.sessions())
    session_rows.push_back({session.id, session.title, std::to_string(session.length)});
  std::vector<std::vector<std::string>> paper_rows;
  for (std::size_t i : shuffled_indices(instance.paper_count(), seed)) {
    const Paper& paper = instance.papers()[i];
    paper_rows.push_back({paper.title, std::to_string(paper.duration)});
  }
  std::string text = kSchedulePromptTemplate;
  text = replace_all(text, "{sessions_df_string}",
                     render_table({"id", "title", "length"}, session_rows));
  text = replace_all(text, "{papers_df_string}",
                     render_table({"title", "duration"}, paper_rows));
  return text;
}

std::string build_cluster_prompt(const std::vector<Paper>& papers, int k, std::uint64_t seed) {
  if (k < 1) throw Error("cluster count must be at least 1");
  std::string titles;
  const std::vector<std::size_t> order = shuffled_indices(papers.size(), seed);
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r > 0) titles += '\n';
    titles += papers[order[r]].title;
  }
  std::string text = kClusterPromptTemplate;
  text = replace_all(text, "{k}", std::to_string(k));
  text = replace_all(text, "{max_label}", std::to_string(k - 1));
  text = replace_all(text, "{n_papers}", std::to_string(papers.size()));
  text = replace_all(text, "{papers_df_string}", titles);
  return text;
}

ZeroShotResult zero_shot_schedule(const Instance& instance, ChatClient& client,
                                  ChatRequest request, std::uint64_t seed) {
  request.prompt = build_schedule_prompt(instance, seed);
  ZeroShotResult result;
  const ChatOutcome outcome = run_chat(client, request, result.transcript);
  result.attempts = outcome.attempts;
  if (outcome.parseable) {
    ParsedScheduleBlock block = parse_schedule_block(outcome.response);
    result.rows = std::move(block.rows);
    result.defects = std::move(block.defects);
  } else {
    result.unparseable = true;
  }
  const Resolution resolved = resolve_titles(result.rows, instance);
  result.resolution = resolved.report;
  if (!result.unparseable) result.schedule = resolved.schedule;
  result.violations = violation_report(instance, result.rows, resolved);
  return result;
}

LlmClusterResult llm_cluster(const std::vector<Paper>& papers, int k, ChatClient& client,
                             ChatRequest request, std::uint64_t seed) {
  if (k < 1) throw Error("cluster count must be at least 1");
  if (papers.empty()) throw Error("cannot cluster an empty paper list");
  request.prompt = build_cluster_prompt(papers, k, seed);
  LlmClusterResult result;
  const ChatOutcome outcome = run_chat(client, request, result.transcript);
  result.attempts = outcome.attempts;
  if (!outcome.parseable)
    throw LlmRunError("no fenced block in any of " + std::to_string(outcome.attempts) +
                          " responses",
                      result.transcript, /*transport=*/false);

  const std::vector<ClusterRow> rows = parse_cluster_rows(outcome.fenced, k);
  std::vector<std::string> titles;
  titles.reserve(rows.size());
  for (const ClusterRow& row : rows) titles.push_back(row.title);
  const TitleMatchResult matches = match_titles(titles, papers);

  // The largest cluster is measured over rows that resolved to a paper;
  // ties go to the lowest label, and a response with no usable rows
  // defaults to 0.
  std::vector<std::optional<int>> paper_label(papers.size());
  std::vector<std::size_t> cluster_count(static_cast<std::size_t>(k), 0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!matches.match[r]) continue;
    paper_label[*matches.match[r]] = rows[r].label;
    ++cluster_count[static_cast<std::size_t>(rows[r].label)];
  }
  int fallback = 0;
  std::size_t best = 0;
  for (std::size_t label = 0; label < cluster_count.size(); ++label) {
    if (cluster_count[label] > best) {
      best = cluster_count[label];
      fallback = static_cast<int>(label);
    }
  }
  for (std::size_t p = 0; p < papers.size(); ++p) {
    if (paper_label[p]) {
      result.labeling.label[papers[p].id] = *paper_label[p];
    } else {
      result.labeling.label[papers[p].id] = fallback;
      result.repaired_papers.push_back(papers[p].id);
    }
  }
  return result;
}

DownsampledInstance downsample(const Instance& instance, const Schedule& reference,
                               int papers_per_session, std::uint64_t seed) {
  if (papers_per_session < 1) throw Error("papers-per-session must be at least 1");
  std::vector<std::vector<std::size_t>> members(instance.session_count());
  for (const auto& [paper_id, session_id] : reference.assignment) {
    const auto p = instance.paper_index(paper_id);
    if (!p) throw Error("reference schedule names unknown paper " + paper_id);
    const auto s = instance.session_index(session_id);
    if (!s) throw Error("reference schedule names unknown session " + session_id);
    members[*s].push_back(*p);
  }
  for (auto& list : members) std::sort(list.begin(), list.end());

  SeededRng rng(seed);
  std::vector<bool> kept(instance.paper_count(), false);
  std::vector<int> new_length(instance.session_count(), 0);
  for (std::size_t s = 0; s < instance.session_count(); ++s) {
    const Session& session = instance.sessions()[s];
    if (members[s].empty()) {
      new_length[s] = session.length;
      continue;
    }
    long long population_duration = 0;
    for (std::size_t p : members[s]) population_duration += instance.papers()[p].duration;
    std::vector<std::size_t> sample = members[s];
    if (sample.size() > static_cast<std::size_t>(papers_per_session)) {
      rng.shuffle(sample);
      sample.resize(static_cast<std::size_t>(papers_per_session));
      std::sort(sample.begin(), sample.end());
    }
    long long kept_duration = 0;
    for (std::size_t p : sample) {
      kept[p] = true;
      kept_duration += instance.papers()[p].duration;
    }
    // Scale the length by the kept share of the population duration so the
    // slack fraction survives; the ceiling keeps a feasible reference
    // feasible, and keeping everything reproduces the length exactly.
    const long long scaled =
        (kept_duration * session.length + population_duration - 1) / population_duration;
    new_length[s] = static_cast<int>(std::max<long long>(1, scaled));
  }

  std::vector<Paper> new_papers;
  Schedule new_reference;
  for (std::size_t p = 0; p < instance.paper_count(); ++p) {
    if (!kept[p]) continue;
    const Paper& paper = instance.papers()[p];
    new_papers.push_back(paper);
    new_reference.assignment[paper.id] = reference.assignment.at(paper.id);
  }
  if (new_papers.empty()) throw Error("reference schedule covers no papers");
  std::vector<Session> new_sessions;
  for (std::size_t s = 0; s < instance.session_count(); ++s) {
    Session session = instance.sessions()[s];
    session.length = new_length[s];
    new_sessions.push_back(std::move(session));
  }
  return {Instance(std::move(new_papers), std::move(new_sessions)), std::move(new_reference)};
}

std::string transcript_to_jsonl(const std::vector<TranscriptEntry>& transcript) {
  std::string out;
  for (const TranscriptEntry& entry : transcript) {
    json line = {
        {"timestamp", entry.timestamp},
        {"prompt", entry.prompt},
        {"response", entry.response},
        {"attempt", entry.attempt},
    };
    if (!entry.error.empty()) line["error"] = entry.error;
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace confsched
