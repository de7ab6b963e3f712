#pragma once

// Schedule and clustering evaluation: entropy-based homogeneity and
// completeness scores, and the constraint-violation report for proposed
// schedules.

#include <cstddef>
#include <string>
#include <vector>

#include "confsched/core.hpp"
#include "confsched/ingest.hpp"

namespace confsched {

struct ScorePair {
  double homogeneity = 0.0;
  double completeness = 0.0;
};

struct OverfullSession {
  std::string session_id;
  double overage_fraction = 0.0;  // (assigned total - length) / length, > 0
};

struct ViolationReport {
  std::vector<std::string> missing_papers;      // no row resolved to them
  std::vector<std::string> added_sessions;      // row tokens not in the instance
  std::vector<OverfullSession> overfull_sessions;
  std::size_t sessions_over_10pct = 0;          // overage_fraction > 0.10
  std::size_t sessions_over_50pct = 0;          // overage_fraction > 0.50
  std::vector<std::string> qa_misplaced;        // Q/A item present but not last
  std::vector<std::string> duplicate_assignments;  // papers emitted more than once

  bool clean() const {
    return missing_papers.empty() && added_sessions.empty() && overfull_sessions.empty() &&
           qa_misplaced.empty() && duplicate_assignments.empty();
  }
};

// Natural-log conditional entropies over the contingency table of
// (reference class, predicted cluster). Degenerate conventions:
// H(reference) = 0 gives homogeneity 1, H(predicted) = 0 gives
// completeness 1. Both labelings must cover the same non-empty paper set.
ScorePair homogeneity_completeness(const Labeling& reference, const Labeling& predicted);

// Converts session assignments to labelings over the papers both schedules
// cover and delegates to homogeneity_completeness. Papers missing from
// either side are excluded (the violation report counts them).
ScorePair schedule_scores(const Schedule& reference, const Schedule& predicted,
                          const Instance& instance);

// Counts defects of a proposed schedule against the instance. Overage is
// measured with ground-truth paper durations, not the durations the rows
// claim. Thresholds are strict: a session overfull by exactly 10% lands in
// neither bucket.
ViolationReport violation_report(const Instance& instance,
                                 const std::vector<RawScheduleRow>& rows,
                                 const Resolution& resolved);

}  // namespace confsched
