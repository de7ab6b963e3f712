#pragma once

// Domain model for conference session assignment: papers, sessions,
// schedules, labelings and pairwise similarity, plus feasibility checking
// and the co-location objective shared by the solver and the metrics.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace confsched {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One accepted talk. `duration` is in minutes and must be positive.
struct Paper {
  std::string id;
  std::string title;
  std::optional<std::string> abstract;
  int duration = 0;
};

// One schedule slot. `length` is the capacity in minutes, positive.
struct Session {
  std::string id;
  std::string title;
  int length = 0;
};

// Immutable problem instance. Construction validates id uniqueness and
// positive durations/lengths; it does NOT require the papers to fit the
// sessions (infeasibility is a solver outcome, not a construction error).
class Instance {
 public:
  Instance(std::vector<Paper> papers, std::vector<Session> sessions);

  const std::vector<Paper>& papers() const { return papers_; }
  const std::vector<Session>& sessions() const { return sessions_; }
  std::size_t paper_count() const { return papers_.size(); }
  std::size_t session_count() const { return sessions_.size(); }

  std::optional<std::size_t> paper_index(const std::string& id) const;
  std::optional<std::size_t> session_index(const std::string& id) const;

  int total_duration() const;
  int total_capacity() const;

 private:
  std::vector<Paper> papers_;
  std::vector<Session> sessions_;
  std::map<std::string, std::size_t> paper_index_;
  std::map<std::string, std::size_t> session_index_;
};

// Assignment of papers to sessions, keyed by id. Solver-produced schedules
// are total over the instance's papers; parsed external schedules may be
// partial (the metrics module reports the gaps).
struct Schedule {
  std::map<std::string, std::string> assignment;

  bool operator==(const Schedule& other) const = default;
};

// Cluster/class assignment of papers. Labels are non-negative but need not
// be contiguous; metric code relabels internally.
struct Labeling {
  std::map<std::string, int> label;

  bool operator==(const Labeling& other) const = default;
};

// Symmetric pairwise paper similarity with a zero diagonal. Entries are
// non-negative. Mutation via set() is meant for construction; treat
// instances as immutable once shared.
class SimilarityMatrix {
 public:
  explicit SimilarityMatrix(std::size_t n);

  // Validates symmetry, zero diagonal and non-negativity.
  static SimilarityMatrix from_values(std::size_t n, std::vector<double> values);

  std::size_t size() const { return n_; }
  double at(std::size_t i, std::size_t j) const;
  // Sets values[i][j] and values[j][i]. Rejects i == j and negative values.
  void set(std::size_t i, std::size_t j, double value);

  // Sum of sim over all unordered pairs {i,j}, i < j.
  double total_pair_sum() const;

 private:
  std::size_t n_;
  std::vector<double> values_;
};

struct FeasibilityReport {
  bool ok = false;
  std::vector<std::string> overfull_sessions;   // capacity exceeded
  std::vector<std::string> unassigned_papers;   // totality violated
};

// ok iff every paper is assigned exactly once and no session's assigned
// durations exceed its length. Throws Error if the schedule references an
// unknown paper or session id.
FeasibilityReport check_feasible(const Instance& instance, const Schedule& schedule);

// Sum over unordered pairs assigned to the same session of sim(i,j).
// Requires a total, well-formed schedule and sim dimension == paper count.
double objective_value(const Instance& instance, const Schedule& schedule,
                       const SimilarityMatrix& sim);

}  // namespace confsched
