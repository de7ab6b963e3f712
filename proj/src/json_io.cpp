#include "confsched/json_io.hpp"

namespace confsched {

using nlohmann::json;

json to_json(const ScorePair& scores) {
  return {{"homogeneity", scores.homogeneity}, {"completeness", scores.completeness}};
}

json to_json(const FeasibilityReport& report) {
  return {{"ok", report.ok},
          {"overfull_sessions", report.overfull_sessions},
          {"unassigned_papers", report.unassigned_papers}};
}

json to_json(const ViolationReport& report) {
  json overfull = json::array();
  for (const OverfullSession& session : report.overfull_sessions)
    overfull.push_back({{"session_id", session.session_id},
                        {"overage_fraction", session.overage_fraction}});
  return {{"missing_papers", report.missing_papers},
          {"missing_paper_count", report.missing_papers.size()},
          {"added_sessions", report.added_sessions},
          {"added_session_count", report.added_sessions.size()},
          {"overfull_sessions", overfull},
          {"sessions_over_10pct", report.sessions_over_10pct},
          {"sessions_over_50pct", report.sessions_over_50pct},
          {"qa_misplaced", report.qa_misplaced},
          {"duplicate_assignments", report.duplicate_assignments},
          {"clean", report.clean()}};
}

json to_json(const ResolutionReport& report) {
  json duplicates = json::array();
  for (const auto& [row, paper_id] : report.duplicate_matches)
    duplicates.push_back({{"row", row}, {"paper_id", paper_id}});
  return {{"unmatched_rows", report.unmatched_rows},
          {"unmatched_papers", report.unmatched_papers},
          {"duplicate_matches", duplicates},
          {"unknown_session_rows", report.unknown_session_rows}};
}

json to_json(const SolverResult& result) {
  json out = {{"status", to_string(result.status)},
              {"bound", result.bound},
              {"nodes_explored", result.nodes_explored}};
  out["objective"] = result.objective ? json(*result.objective) : json(nullptr);
  if (result.schedule) {
    json assignment = json::object();
    for (const auto& [paper_id, session_id] : result.schedule->assignment)
      assignment[paper_id] = session_id;
    out["assignment"] = std::move(assignment);
  } else {
    out["assignment"] = nullptr;
  }
  return out;
}

}  // namespace confsched
