#include "confsched/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

namespace confsched {

namespace {

constexpr double kBoundEps = 1e-12;

// Paper indices in branching order: descending duration, then input order.
std::vector<std::size_t> branching_order(const Instance& instance) {
  std::vector<std::size_t> order(instance.paper_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return instance.papers()[a].duration > instance.papers()[b].duration;
  });
  return order;
}

Schedule to_schedule(const Instance& instance, const std::vector<std::size_t>& session_of) {
  Schedule schedule;
  for (std::size_t i = 0; i < instance.paper_count(); ++i) {
    schedule.assignment[instance.papers()[i].id] = instance.sessions()[session_of[i]].id;
  }
  return schedule;
}

class BranchAndBound {
 public:
  explicit BranchAndBound(const SolverProblem& problem)
      : instance_(problem.instance),
        sim_(problem.sim),
        n_(problem.instance.paper_count()),
        m_(problem.instance.session_count()),
        order_(branching_order(problem.instance)),
        total_pair_sum_(problem.sim.total_pair_sum()),
        deadline_(compute_deadline(problem)) {}

  SolverResult run(const std::optional<Schedule>& warm_start) {
    remaining_capacity_.resize(m_);
    int remaining_duration = 0;
    for (std::size_t j = 0; j < m_; ++j) remaining_capacity_[j] = instance_.sessions()[j].length;
    for (std::size_t i = 0; i < n_; ++i) remaining_duration += instance_.papers()[i].duration;
    remaining_duration_ = remaining_duration;
    remaining_capacity_total_ = 0;
    for (int c : remaining_capacity_) remaining_capacity_total_ += c;
    members_.assign(m_, {});
    assigned_session_.assign(n_, m_);  // m_ = unassigned sentinel
    frames_.assign(n_, {});

    if (warm_start) {
      incumbent_.assign(n_, 0);
      double objective = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        auto it = warm_start->assignment.find(instance_.papers()[i].id);
        incumbent_[i] = *instance_.session_index(it->second);
      }
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
          if (incumbent_[i] == incumbent_[j]) objective += sim_.at(i, j);
        }
      }
      incumbent_objective_ = objective;
      have_incumbent_ = true;
    }

    dfs(0);

    SolverResult result;
    result.nodes_explored = nodes_;
    if (timed_out_) {
      result.status =
          have_incumbent_ ? SolveStatus::kTimeoutWithIncumbent : SolveStatus::kTimeoutNoIncumbent;
      result.bound = timeout_bound();
      if (have_incumbent_) {
        result.schedule = to_schedule(instance_, incumbent_);
        result.objective = incumbent_objective_;
      }
    } else if (have_incumbent_) {
      result.status = SolveStatus::kOptimal;
      result.schedule = to_schedule(instance_, incumbent_);
      result.objective = incumbent_objective_;
      result.bound = incumbent_objective_;
    } else {
      result.status = SolveStatus::kInfeasible;
      result.bound = 0.0;
    }
    if (result.schedule && !check_feasible(instance_, *result.schedule).ok) {
      throw Error("internal solver error: produced an infeasible schedule");
    }
    return result;
  }

 private:
  struct Child {
    std::size_t session;
    double gain;        // realized similarity with papers already there
    double bound;       // node bound after taking this child
  };

  struct Frame {
    std::vector<Child> children;
    std::size_t cursor = 0;  // children[cursor..] not yet fully explored
  };

  static std::optional<std::chrono::steady_clock::time_point> compute_deadline(
      const SolverProblem& problem) {
    if (!problem.time_budget_seconds) return std::nullopt;
    auto budget = std::chrono::duration<double>(*problem.time_budget_seconds);
    return std::chrono::steady_clock::now() +
           std::chrono::duration_cast<std::chrono::steady_clock::duration>(budget);
  }

  bool out_of_time() {
    if (!deadline_) return false;
    return std::chrono::steady_clock::now() >= *deadline_;
  }

  void dfs(std::size_t depth) {
    ++nodes_;
    if (timed_out_ || (timed_out_ = out_of_time())) return;

    if (depth == n_) {
      double objective = total_pair_sum_ - lost_;  // everything decided
      if (!have_incumbent_ || objective > incumbent_objective_) {
        incumbent_ = assigned_session_;
        incumbent_objective_ = objective;
        have_incumbent_ = true;
      }
      return;
    }

    // Total-capacity test: the unassigned papers must fit somewhere.
    if (remaining_duration_ > remaining_capacity_total_) return;

    std::size_t paper = order_[depth];
    int duration = instance_.papers()[paper].duration;

    double assigned_sim_total = 0.0;
    for (std::size_t other = 0; other < n_; ++other) {
      if (assigned_session_[other] != m_) assigned_sim_total += sim_.at(paper, other);
    }

    Frame& frame = frames_[depth];
    frame.children.clear();
    frame.cursor = 0;
    std::vector<int> empty_length_seen;
    for (std::size_t s = 0; s < m_; ++s) {
      if (remaining_capacity_[s] < duration) continue;
      if (members_[s].empty()) {
        // Empty sessions of equal length are interchangeable; keep the first.
        int length = instance_.sessions()[s].length;
        if (std::find(empty_length_seen.begin(), empty_length_seen.end(), length) !=
            empty_length_seen.end()) {
          continue;
        }
        empty_length_seen.push_back(length);
      }
      double gain = 0.0;
      for (std::size_t member : members_[s]) gain += sim_.at(paper, member);
      double lost_delta = assigned_sim_total - gain;
      frame.children.push_back({s, gain, total_pair_sum_ - (lost_ + lost_delta)});
    }
    std::stable_sort(frame.children.begin(), frame.children.end(),
                     [](const Child& a, const Child& b) { return a.gain > b.gain; });

    for (frame.cursor = 0; frame.cursor < frame.children.size(); ++frame.cursor) {
      const Child& child = frame.children[frame.cursor];
      if (have_incumbent_ && child.bound <= incumbent_objective_ + kBoundEps) continue;

      std::size_t s = child.session;
      double lost_delta = assigned_sim_total - child.gain;
      assigned_session_[paper] = s;
      members_[s].push_back(paper);
      remaining_capacity_[s] -= duration;
      remaining_capacity_total_ -= duration;
      remaining_duration_ -= duration;
      lost_ += lost_delta;

      dfs(depth + 1);

      lost_ -= lost_delta;
      remaining_duration_ += duration;
      remaining_capacity_total_ += duration;
      remaining_capacity_[s] += duration;
      members_[s].pop_back();
      assigned_session_[paper] = m_;

      if (timed_out_) return;
    }
  }

  // Upper bound over everything not yet explored when the clock ran out:
  // the frames on the abandoned stack still hold their open children.
  double timeout_bound() const {
    double bound = have_incumbent_ ? incumbent_objective_ : 0.0;
    bool any_open = false;
    for (const Frame& frame : frames_) {
      for (std::size_t c = frame.cursor; c < frame.children.size(); ++c) {
        bound = std::max(bound, frame.children[c].bound);
        any_open = true;
      }
    }
    // No open frame means the clock expired before the root was expanded;
    // nothing has been ruled out yet.
    if (!any_open) return total_pair_sum_;
    return bound;
  }

  const Instance& instance_;
  const SimilarityMatrix& sim_;
  std::size_t n_;
  std::size_t m_;
  std::vector<std::size_t> order_;
  double total_pair_sum_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;

  std::vector<int> remaining_capacity_;
  int remaining_capacity_total_ = 0;
  int remaining_duration_ = 0;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::size_t> assigned_session_;
  std::vector<Frame> frames_;

  // Similarity mass of pairs already decided apart; node bound is
  // total_pair_sum_ - lost_.
  double lost_ = 0.0;

  std::vector<std::size_t> incumbent_;
  double incumbent_objective_ = 0.0;
  bool have_incumbent_ = false;
  bool timed_out_ = false;
  std::uint64_t nodes_ = 0;
};

}  // namespace

SolverProblem::SolverProblem(Instance instance_in, SimilarityMatrix sim_in,
                             std::optional<double> time_budget)
    : instance(std::move(instance_in)),
      sim(std::move(sim_in)),
      time_budget_seconds(time_budget) {
  if (sim.size() != instance.paper_count()) {
    throw Error("similarity matrix dimension does not match paper count");
  }
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasibleIncumbent: return "feasible-incumbent";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeoutWithIncumbent: return "timeout-with-incumbent";
    case SolveStatus::kTimeoutNoIncumbent: return "timeout-no-incumbent";
  }
  return "unknown";
}

std::optional<Schedule> greedy_incumbent(const SolverProblem& problem) {
  const Instance& instance = problem.instance;
  const SimilarityMatrix& sim = problem.sim;
  const std::size_t n = instance.paper_count();
  const std::size_t m = instance.session_count();

  std::vector<std::size_t> order = branching_order(instance);
  std::vector<int> remaining(m);
  for (std::size_t j = 0; j < m; ++j) remaining[j] = instance.sessions()[j].length;
  std::vector<std::vector<std::size_t>> members(m);
  std::vector<std::size_t> session_of(n, m);

  for (std::size_t paper : order) {
    int duration = instance.papers()[paper].duration;
    std::optional<std::size_t> best;
    double best_gain = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
      if (remaining[s] < duration) continue;
      double gain = 0.0;
      for (std::size_t member : members[s]) gain += sim.at(paper, member);
      bool better = !best || gain > best_gain ||
                    (gain == best_gain && remaining[s] > remaining[*best]);
      if (better) {
        best = s;
        best_gain = gain;
      }
    }
    if (!best) return std::nullopt;  // stranded; says nothing about feasibility
    session_of[paper] = *best;
    members[*best].push_back(paper);
    remaining[*best] -= duration;
  }
  return to_schedule(instance, session_of);
}

SolverResult solve(const SolverProblem& problem) {
  BranchAndBound search(problem);
  return search.run(greedy_incumbent(problem));
}

SolverResult brute_force(const SolverProblem& problem) {
  const Instance& instance = problem.instance;
  const SimilarityMatrix& sim = problem.sim;
  const std::size_t n = instance.paper_count();
  const std::size_t m = instance.session_count();

  double combinations = std::pow(static_cast<double>(m), static_cast<double>(n));
  if (combinations > 1e7) {
    throw Error("instance too large for brute force: M^N > 10^7");
  }

  std::vector<std::size_t> digits(n, 0);
  std::vector<std::size_t> best;
  double best_objective = 0.0;
  bool found = false;
  std::uint64_t enumerated = 0;

  while (true) {
    ++enumerated;
    std::vector<int> load(m, 0);
    bool feasible = true;
    for (std::size_t i = 0; i < n && feasible; ++i) {
      load[digits[i]] += instance.papers()[i].duration;
      if (load[digits[i]] > instance.sessions()[digits[i]].length) feasible = false;
    }
    if (feasible) {
      double objective = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (digits[i] == digits[j]) objective += sim.at(i, j);
        }
      }
      if (!found || objective > best_objective) {
        best = digits;
        best_objective = objective;
        found = true;
      }
    }
    // Odometer, last digit fastest.
    bool wrapped_out = false;
    std::size_t pos = n;
    while (true) {
      if (pos == 0) {
        wrapped_out = true;
        break;
      }
      --pos;
      if (++digits[pos] < m) break;
      digits[pos] = 0;
    }
    if (wrapped_out) break;
  }

  SolverResult result;
  result.nodes_explored = enumerated;
  if (found) {
    result.status = SolveStatus::kOptimal;
    result.schedule = to_schedule(instance, best);
    result.objective = best_objective;
    result.bound = best_objective;
  } else {
    result.status = SolveStatus::kInfeasible;
    result.bound = 0.0;
  }
  return result;
}

}  // namespace confsched
