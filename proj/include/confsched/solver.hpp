#pragma once

// Exact solver for the session-assignment problem: place every paper in
// exactly one session without exceeding session lengths, maximizing the
// summed similarity of co-located paper pairs. Depth-first branch-and-bound
// over per-paper session choices; the pairwise co-location variables of the
// usual linearization stay implicit.

#include <cstdint>
#include <optional>
#include <string>

#include "confsched/core.hpp"

namespace confsched {

struct SolverProblem {
  SolverProblem(Instance instance, SimilarityMatrix sim,
                std::optional<double> time_budget_seconds = std::nullopt);

  Instance instance;
  SimilarityMatrix sim;  // dimension == paper count, checked at construction
  std::optional<double> time_budget_seconds;
};

enum class SolveStatus {
  kOptimal,
  kFeasibleIncumbent,
  kInfeasible,
  kTimeoutWithIncumbent,
  kTimeoutNoIncumbent,
};

const char* to_string(SolveStatus status);

struct SolverResult {
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<Schedule> schedule;
  std::optional<double> objective;
  // Upper bound on the optimum. Equals the objective when status is
  // optimal; 0 when the instance is proven infeasible.
  double bound = 0.0;
  std::uint64_t nodes_explored = 0;
};

// First-fit-decreasing warm start: papers by descending duration, each into
// the feasible session with the best marginal similarity gain (ties: most
// remaining capacity, then lowest session index). Returns nothing when the
// pass strands a paper; that does not prove infeasibility.
std::optional<Schedule> greedy_incumbent(const SolverProblem& problem);

// Branch-and-bound to proven optimality (or until the time budget runs
// out). Branches on papers in descending-duration order; children are
// sessions by descending marginal gain. Prunes on the total-capacity test
// and on the admissible bound that credits every undecided pair its full
// similarity. Among empty sessions of equal length only the lowest-indexed
// one is branched into. Deterministic for a fixed problem.
SolverResult solve(const SolverProblem& problem);

// Exhaustive oracle: enumerates all M^N assignments. Guarded to
// M^N <= 10^7; meant for tests and the CLI --oracle mode.
SolverResult brute_force(const SolverProblem& problem);

}  // namespace confsched
