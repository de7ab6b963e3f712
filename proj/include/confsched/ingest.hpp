#pragma once

// File and wire-format ingestion: papers/sessions CSVs, the @-delimited
// fenced schedule block emitted by LLMs, and fuzzy recovery of paper
// identities from (possibly truncated) titles.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "confsched/core.hpp"

namespace confsched {

class IngestError : public Error {
 public:
  using Error::Error;
};

// One line of the schedule wire format, split on '@'. `duration` is the
// value claimed by the row, not ground truth.
struct RawScheduleRow {
  std::string session;
  std::string talk_title;
  int duration = 0;
};

struct ParseDefect {
  std::size_t line = 0;  // 1-based within the fenced block
  std::string text;
  std::string reason;
};

struct ParsedScheduleBlock {
  bool fence_found = false;
  std::vector<RawScheduleRow> rows;
  std::vector<ParseDefect> defects;
};

inline constexpr const char* kScheduleHeader = "session@talk_title@duration";
inline constexpr const char* kQaTitle = "Discussions and Q/A";

// `id,title,abstract,duration` with RFC-4180 quoting. Abstract may be empty.
std::vector<Paper> load_papers(const std::string& path);

// `id,title,length`.
std::vector<Session> load_sessions(const std::string& path);

// `paper_id,cluster`.
Labeling load_labeling(const std::string& path);
void save_labeling(const std::string& path, const Labeling& labeling);

// First region delimited by triple backquotes; anything after the opening
// fence on the same line (a language tag, say) is dropped. Empty when no
// complete fence exists.
std::optional<std::string> extract_fenced_block(const std::string& text);

// Never throws on arbitrary text: malformed lines land in `defects` and
// parsing continues. A missing fence is reported via fence_found=false.
ParsedScheduleBlock parse_schedule_block(const std::string& text);

// Case-folded, punctuation-to-space, whitespace-collapsed form used for
// title matching.
std::string normalize_title(const std::string& title);

// Longest-common-prefix ratio over normalized titles, in [0,1]. The
// denominator is the shorter normalized length so that a truncated title
// ("first 40 chars...") still scores 1 against its source.
double title_similarity(const std::string& a, const std::string& b);

inline constexpr double kTitleMatchThreshold = 0.6;

bool is_qa_title(const std::string& title);

// Greedy one-to-one matching of input titles to papers by descending
// similarity; ties broken by smallest edit distance over the normalized
// forms, then input order, then paper order. Scores below the threshold
// never match.
struct TitleMatchResult {
  // Per input title: matched paper index, or nullopt.
  std::vector<std::optional<std::size_t>> match;
  // Inputs with no candidate paper at all.
  std::vector<std::size_t> unmatched_inputs;
  // Inputs whose every above-threshold candidate was already taken by a
  // better-scoring input; evidence that a paper was emitted twice.
  // Pairs of (input index, paper index of the best taken candidate).
  std::vector<std::pair<std::size_t, std::size_t>> duplicate_matches;
};
TitleMatchResult match_titles(const std::vector<std::string>& titles,
                              const std::vector<Paper>& papers);

struct ResolutionReport {
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::string> unmatched_papers;  // instance papers no row matched
  std::vector<std::pair<std::size_t, std::string>> duplicate_matches;  // row -> paper id
  std::vector<std::size_t> unknown_session_rows;  // "added session" evidence
  // All title matches, including rows with unknown session tokens.
  std::vector<std::optional<std::size_t>> row_paper;  // row -> paper index
};

struct Resolution {
  Schedule schedule;  // rows with a matched paper and a known session only
  ResolutionReport report;
};

Resolution resolve_titles(const std::vector<RawScheduleRow>& rows, const Instance& instance);

struct EmittedSchedule {
  std::string text;
  std::vector<std::string> sanitized_papers;  // ids whose title contained '@'
};

// Fenced block: fence, header, one row per paper (session order, then
// instance paper order), fence. '@' in titles becomes "(at)". Requires a
// total schedule.
EmittedSchedule emit_schedule(const Instance& instance, const Schedule& schedule);

// Reference schedules on disk use the same wire format. Parses, resolves
// and requires every row to land: any defect is an IngestError.
Schedule load_schedule_file(const std::string& path, const Instance& instance);
void save_schedule_file(const std::string& path, const Instance& instance,
                        const Schedule& schedule);

}  // namespace confsched
