#pragma once

// JSON views of the result types the CLI emits. Keys are stable;
// downstream tooling parses these, so additions are fine but renames and
// type changes are not.

#include <json.hpp>

#include "confsched/core.hpp"
#include "confsched/ingest.hpp"
#include "confsched/metrics.hpp"
#include "confsched/solver.hpp"

namespace confsched {

nlohmann::json to_json(const ScorePair& scores);
nlohmann::json to_json(const FeasibilityReport& report);
nlohmann::json to_json(const ViolationReport& report);
nlohmann::json to_json(const ResolutionReport& report);
nlohmann::json to_json(const SolverResult& result);

}  // namespace confsched
