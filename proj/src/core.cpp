#include "confsched/core.hpp"

#include <cmath>

namespace confsched {

Instance::Instance(std::vector<Paper> papers, std::vector<Session> sessions)
    : papers_(std::move(papers)), sessions_(std::move(sessions)) {
  if (papers_.empty()) throw Error("instance needs at least one paper");
  if (sessions_.empty()) throw Error("instance needs at least one session");
  for (std::size_t i = 0; i < papers_.size(); ++i) {
    const Paper& p = papers_[i];
    if (p.duration <= 0) {
      throw Error("paper '" + p.id + "' has non-positive duration");
    }
    if (!paper_index_.emplace(p.id, i).second) {
      throw Error("duplicate paper id '" + p.id + "'");
    }
  }
  for (std::size_t j = 0; j < sessions_.size(); ++j) {
    const Session& s = sessions_[j];
    if (s.length <= 0) {
      throw Error("session '" + s.id + "' has non-positive length");
    }
    if (!session_index_.emplace(s.id, j).second) {
      throw Error("duplicate session id '" + s.id + "'");
    }
  }
}

std::optional<std::size_t> Instance::paper_index(const std::string& id) const {
  auto it = paper_index_.find(id);
  if (it == paper_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Instance::session_index(const std::string& id) const {
  auto it = session_index_.find(id);
  if (it == session_index_.end()) return std::nullopt;
  return it->second;
}

int Instance::total_duration() const {
  int sum = 0;
  for (const Paper& p : papers_) sum += p.duration;
  return sum;
}

int Instance::total_capacity() const {
  int sum = 0;
  for (const Session& s : sessions_) sum += s.length;
  return sum;
}

SimilarityMatrix::SimilarityMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {
  if (n == 0) throw Error("similarity matrix needs at least one paper");
}

SimilarityMatrix SimilarityMatrix::from_values(std::size_t n, std::vector<double> values) {
  if (values.size() != n * n) {
    throw Error("similarity matrix values have wrong size");
  }
  SimilarityMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i * n + i] != 0.0) {
      throw Error("similarity matrix diagonal must be zero");
    }
    for (std::size_t j = 0; j < n; ++j) {
      double v = values[i * n + j];
      if (v < 0.0 || !std::isfinite(v)) {
        throw Error("similarity values must be finite and non-negative");
      }
      if (v != values[j * n + i]) {
        throw Error("similarity matrix must be symmetric");
      }
    }
  }
  m.values_ = std::move(values);
  return m;
}

double SimilarityMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw Error("similarity index out of range");
  return values_[i * n_ + j];
}

void SimilarityMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i >= n_ || j >= n_) throw Error("similarity index out of range");
  if (i == j) throw Error("similarity diagonal is fixed to zero");
  if (value < 0.0 || !std::isfinite(value)) {
    throw Error("similarity values must be finite and non-negative");
  }
  values_[i * n_ + j] = value;
  values_[j * n_ + i] = value;
}

double SimilarityMatrix::total_pair_sum() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      sum += values_[i * n_ + j];
    }
  }
  return sum;
}

FeasibilityReport check_feasible(const Instance& instance, const Schedule& schedule) {
  FeasibilityReport report;
  std::vector<int> load(instance.session_count(), 0);
  std::vector<bool> assigned(instance.paper_count(), false);

  for (const auto& [paper_id, session_id] : schedule.assignment) {
    auto pi = instance.paper_index(paper_id);
    if (!pi) throw Error("schedule references unknown paper id '" + paper_id + "'");
    auto si = instance.session_index(session_id);
    if (!si) throw Error("schedule references unknown session id '" + session_id + "'");
    assigned[*pi] = true;
    load[*si] += instance.papers()[*pi].duration;
  }

  for (std::size_t i = 0; i < instance.paper_count(); ++i) {
    if (!assigned[i]) report.unassigned_papers.push_back(instance.papers()[i].id);
  }
  for (std::size_t j = 0; j < instance.session_count(); ++j) {
    if (load[j] > instance.sessions()[j].length) {
      report.overfull_sessions.push_back(instance.sessions()[j].id);
    }
  }
  report.ok = report.unassigned_papers.empty() && report.overfull_sessions.empty();
  return report;
}

double objective_value(const Instance& instance, const Schedule& schedule,
                       const SimilarityMatrix& sim) {
  if (sim.size() != instance.paper_count()) {
    throw Error("similarity matrix dimension does not match paper count");
  }
  // Session index per paper, in instance paper order.
  std::vector<std::size_t> session_of(instance.paper_count());
  for (std::size_t i = 0; i < instance.paper_count(); ++i) {
    const std::string& pid = instance.papers()[i].id;
    auto it = schedule.assignment.find(pid);
    if (it == schedule.assignment.end()) {
      throw Error("schedule is not total: paper '" + pid + "' unassigned");
    }
    auto si = instance.session_index(it->second);
    if (!si) throw Error("schedule references unknown session id '" + it->second + "'");
    session_of[i] = *si;
  }
  for (const auto& [paper_id, _] : schedule.assignment) {
    if (!instance.paper_index(paper_id)) {
      throw Error("schedule references unknown paper id '" + paper_id + "'");
    }
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < instance.paper_count(); ++i) {
    for (std::size_t j = i + 1; j < instance.paper_count(); ++j) {
      if (session_of[i] == session_of[j]) sum += sim.at(i, j);
    }
  }
  return sum;
}

}  // namespace confsched
