#pragma once

// Shared test utilities: seeded generators for instances, labelings and
// schedules; independently coded oracles the suites compare against; temp
// directories and a runner for the command-line binary.

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "confsched/core.hpp"
#include "confsched/metrics.hpp"
#include "confsched/rng.hpp"

namespace testutil {

inline const std::vector<std::string>& word_bank() {
  static const std::vector<std::string> words = {
      "neural",   "testing",  "coverage",  "refactor", "kernel",  "cloud",
      "mobile",   "defect",   "review",    "search",   "graph",   "binary",
      "fuzzing",  "static",   "dynamic",   "metric",   "schema",  "release",
      "pipeline", "compiler", "embedding", "dataset",  "agile",   "quality",
      "security", "energy",   "latency",   "traces",   "mining",  "versioning"};
  return words;
}

// Distinct, '@'-free titles; the leading index keeps normalized forms
// unique even across random word collisions.
inline std::string random_title(confsched::SeededRng& rng, std::size_t index) {
  const auto& words = word_bank();
  std::string title = "Study " + std::to_string(index);
  const std::size_t extra = 2 + rng.next_index(3);
  for (std::size_t w = 0; w < extra; ++w) {
    title += ' ';
    title += words[rng.next_index(words.size())];
  }
  return title;
}

struct InstanceParams {
  int min_papers = 1;
  int max_papers = 8;
  int min_sessions = 1;
  int max_sessions = 3;
  int min_duration = 1;
  int max_duration = 10;
  int min_capacity = 5;
  int max_capacity = 30;
};

inline confsched::Instance random_instance(confsched::SeededRng& rng,
                                           const InstanceParams& params = {}) {
  const int n = params.min_papers + rng.next_int(0, params.max_papers - params.min_papers);
  const int m =
      params.min_sessions + rng.next_int(0, params.max_sessions - params.min_sessions);
  std::vector<confsched::Paper> papers;
  for (int i = 0; i < n; ++i) {
    confsched::Paper paper;
    paper.id = "p" + std::to_string(i);
    paper.title = random_title(rng, static_cast<std::size_t>(i));
    paper.duration = rng.next_int(params.min_duration, params.max_duration);
    papers.push_back(std::move(paper));
  }
  std::vector<confsched::Session> sessions;
  for (int j = 0; j < m; ++j) {
    confsched::Session session;
    session.id = "s" + std::to_string(j);
    session.title = "Session " + std::to_string(j);
    session.length = rng.next_int(params.min_capacity, params.max_capacity);
    sessions.push_back(std::move(session));
  }
  return confsched::Instance(std::move(papers), std::move(sessions));
}

inline confsched::Labeling random_labeling(confsched::SeededRng& rng,
                                           const std::vector<std::string>& ids, int k) {
  confsched::Labeling labeling;
  for (const std::string& id : ids) labeling.label[id] = rng.next_int(0, k - 1);
  return labeling;
}

inline std::vector<std::string> paper_ids(const confsched::Instance& instance) {
  std::vector<std::string> ids;
  for (const confsched::Paper& paper : instance.papers()) ids.push_back(paper.id);
  return ids;
}

// Binary similarity from a random k-clustering: 1 for same-cluster pairs.
inline confsched::SimilarityMatrix random_binary_sim(confsched::SeededRng& rng,
                                                     std::size_t n, int k) {
  std::vector<int> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = rng.next_int(0, k - 1);
  confsched::SimilarityMatrix sim(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      sim.set(i, j, label[i] == label[j] ? 1.0 : 0.0);
  return sim;
}

// Dense random similarities rounded to 3 decimals.
inline confsched::SimilarityMatrix random_real_sim(confsched::SeededRng& rng, std::size_t n) {
  confsched::SimilarityMatrix sim(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      sim.set(i, j, std::round(rng.next_double() * 1000.0) / 1000.0);
  return sim;
}

// Uniform assignment of each paper to a session; ignores capacities.
inline confsched::Schedule random_assignment(confsched::SeededRng& rng,
                                             const confsched::Instance& instance) {
  confsched::Schedule schedule;
  for (const confsched::Paper& paper : instance.papers()) {
    const std::size_t s = rng.next_index(instance.session_count());
    schedule.assignment[paper.id] = instance.sessions()[s].id;
  }
  return schedule;
}

// Random-order first fit, retried; a cheap feasible-schedule sampler.
inline std::optional<confsched::Schedule> random_feasible_schedule(
    confsched::SeededRng& rng, const confsched::Instance& instance, int tries = 50) {
  const std::size_t n = instance.paper_count();
  const std::size_t m = instance.session_count();
  for (int attempt = 0; attempt < tries; ++attempt) {
    std::vector<std::size_t> paper_order(n);
    for (std::size_t i = 0; i < n; ++i) paper_order[i] = i;
    rng.shuffle(paper_order);
    std::vector<int> remaining(m);
    for (std::size_t j = 0; j < m; ++j) remaining[j] = instance.sessions()[j].length;
    confsched::Schedule schedule;
    bool ok = true;
    for (std::size_t paper : paper_order) {
      std::vector<std::size_t> session_order(m);
      for (std::size_t j = 0; j < m; ++j) session_order[j] = j;
      rng.shuffle(session_order);
      bool placed = false;
      for (std::size_t s : session_order) {
        if (remaining[s] >= instance.papers()[paper].duration) {
          remaining[s] -= instance.papers()[paper].duration;
          schedule.assignment[instance.papers()[paper].id] = instance.sessions()[s].id;
          placed = true;
          break;
        }
      }
      if (!placed) {
        ok = false;
        break;
      }
    }
    if (ok) return schedule;
  }
  return std::nullopt;
}

// Independent score oracle: joint-distribution entropies via log ratios,
// a different formulation than the library's contingency-row sums.
inline confsched::ScorePair entropy_oracle(const confsched::Labeling& reference,
                                           const confsched::Labeling& predicted) {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ref_count;
  std::map<int, double> pred_count;
  double n = 0.0;
  for (const auto& [id, ref_label] : reference.label) {
    const int pred_label = predicted.label.at(id);
    joint[{ref_label, pred_label}] += 1.0;
    ref_count[ref_label] += 1.0;
    pred_count[pred_label] += 1.0;
    n += 1.0;
  }
  const auto entropy = [n](const std::map<int, double>& counts) {
    double h = 0.0;
    for (const auto& [label, count] : counts) {
      (void)label;
      h -= (count / n) * std::log(count / n);
    }
    return h;
  };
  const double h_ref = entropy(ref_count);
  const double h_pred = entropy(pred_count);
  double h_ref_given_pred = 0.0;
  double h_pred_given_ref = 0.0;
  for (const auto& [pair, count] : joint) {
    h_ref_given_pred -= (count / n) * std::log(count / pred_count.at(pair.second));
    h_pred_given_ref -= (count / n) * std::log(count / ref_count.at(pair.first));
  }
  confsched::ScorePair scores;
  scores.homogeneity = h_ref == 0.0 ? 1.0 : 1.0 - h_ref_given_pred / h_ref;
  scores.completeness = h_pred == 0.0 ? 1.0 : 1.0 - h_pred_given_ref / h_pred;
  return scores;
}

// Objective oracle over the explicit per-session indicator variables.
inline double objective_oracle(const confsched::Instance& instance,
                               const confsched::Schedule& schedule,
                               const confsched::SimilarityMatrix& sim) {
  const std::size_t n = instance.paper_count();
  const std::size_t m = instance.session_count();
  std::vector<std::vector<int>> x(n, std::vector<int>(m, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& session_id = schedule.assignment.at(instance.papers()[i].id);
    x[i][*instance.session_index(session_id)] = 1;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t s = 0; s < m; ++s)
        if (x[i][s] == 1 && x[j][s] == 1) total += sim.at(i, j);
  return total;
}

inline std::filesystem::path make_temp_dir(const std::string& tag) {
  static int counter = 0;
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() /
      ("confsched-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
       std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream content;
  content << in.rdbuf();
  return content.str();
}

inline std::string papers_csv(const confsched::Instance& instance) {
  std::string text = "id,title,abstract,duration\n";
  for (const confsched::Paper& paper : instance.papers()) {
    text += paper.id + "," + paper.title + "," +
            (paper.abstract ? *paper.abstract : std::string()) + "," +
            std::to_string(paper.duration) + "\n";
  }
  return text;
}

inline std::string sessions_csv(const confsched::Instance& instance) {
  std::string text = "id,title,length\n";
  for (const confsched::Session& session : instance.sessions()) {
    text += session.id + "," + session.title + "," + std::to_string(session.length) + "\n";
  }
  return text;
}

inline std::string labeling_csv(const confsched::Labeling& labeling) {
  std::string text = "paper_id,cluster\n";
  for (const auto& [id, label] : labeling.label)
    text += id + "," + std::to_string(label) + "\n";
  return text;
}

#ifdef CONFSCHED_BIN_PATH
struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the installed binary in `workdir`; arguments must not contain
// single quotes. `env_prefix` is prepended verbatim to the command, e.g.
// "CONFSCHED_REPLAY_DIR='/tmp/x'".
inline CliResult run_cli(const std::vector<std::string>& args,
                         const std::filesystem::path& workdir,
                         const std::string& env_prefix = "") {
  const std::filesystem::path out_path = workdir / ".cli_stdout";
  const std::filesystem::path err_path = workdir / ".cli_stderr";
  std::string command = "cd '" + workdir.string() + "' && " +
                        (env_prefix.empty() ? "" : env_prefix + " ") + "'" CONFSCHED_BIN_PATH "'";
  for (const std::string& arg : args) command += " '" + arg + "'";
  command += " > '" + out_path.string() + "' 2> '" + err_path.string() + "'";
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  return result;
}
#endif

}  // namespace testutil
