// confsched: conference session assignment over papers/sessions CSV files.
// Subcommands: cluster (TFIDF or chat-model clustering), solve (exact
// assignment), llm-schedule (zero-shot scheduling), evaluate (score a
// candidate schedule), ingest-check (validate input files).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "confsched/core.hpp"
#include "confsched/csv.hpp"
#include "confsched/ingest.hpp"
#include "confsched/json_io.hpp"
#include "confsched/llm.hpp"
#include "confsched/metrics.hpp"
#include "confsched/similarity.hpp"
#include "confsched/solver.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitTimeout = 4;
constexpr int kExitTransport = 5;

struct GlobalOptions {
  std::uint64_t seed = 0;
  bool json = false;
  std::string output;
  std::string config_path;
};

// Human-readable lines move to stderr when stdout carries JSON.
std::ostream& human(const GlobalOptions& global) {
  return global.json ? std::cerr : std::cout;
}

void emit_json(const GlobalOptions& global, const json& payload) {
  if (global.json) std::cout << payload.dump(2) << '\n';
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw confsched::Error("cannot read " + path);
  std::ostringstream content;
  content << in.rdbuf();
  return content.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw confsched::Error("cannot write " + path);
}

std::optional<std::string> env_string(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

std::string format_scores(const confsched::ScorePair& scores) {
  char buffer[80];
  std::snprintf(buffer, sizeof buffer, "h=%.6f c=%.6f", scores.homogeneity,
                scores.completeness);
  return buffer;
}

// Chat transport settings shared by `cluster --method llm` and
// `llm-schedule`. Each knob resolves as flag > environment > config file.
struct LlmOptions {
  std::string replay_dir;
  std::string endpoint_url;
  std::string model = "gpt-4";
  double temperature = 0.8;
  int max_retries = 3;
};

struct LlmOptionBindings {
  CLI::Option* replay_dir = nullptr;
  CLI::Option* endpoint_url = nullptr;
  CLI::Option* model = nullptr;
  CLI::Option* temperature = nullptr;
  CLI::Option* max_retries = nullptr;
};

LlmOptionBindings add_llm_options(CLI::App* sub, LlmOptions& llm) {
  LlmOptionBindings bindings;
  bindings.replay_dir = sub->add_option(
      "--replay-dir", llm.replay_dir,
      "Directory of recorded responses named {sha256(prompt)}.txt; runs offline");
  bindings.endpoint_url = sub->add_option("--endpoint-url", llm.endpoint_url,
                                          "Chat-completion endpoint URL");
  bindings.model = sub->add_option("--model", llm.model, "Model name sent with each request")
                       ->capture_default_str();
  bindings.temperature =
      sub->add_option("--temperature", llm.temperature, "Sampling temperature")
          ->capture_default_str();
  bindings.max_retries =
      sub->add_option("--max-retries", llm.max_retries, "Total attempt budget per prompt")
          ->capture_default_str();
  return bindings;
}

void finish_llm_options(const LlmOptionBindings& bindings, const std::string& config_path,
                        LlmOptions& llm) {
  json config = json::object();
  if (!config_path.empty()) {
    config = json::parse(read_text_file(config_path), nullptr, false);
    if (!config.is_object())
      throw confsched::Error("config file must hold a JSON object: " + config_path);
  }
  auto pick_string = [&](CLI::Option* flag, const char* env, const char* key,
                         std::string& slot) {
    if (flag->count() > 0) return;
    if (auto value = env_string(env)) {
      slot = *value;
      return;
    }
    if (config.contains(key) && config[key].is_string()) slot = config[key].get<std::string>();
  };
  pick_string(bindings.replay_dir, "CONFSCHED_REPLAY_DIR", "replay_dir", llm.replay_dir);
  pick_string(bindings.endpoint_url, "CONFSCHED_ENDPOINT_URL", "endpoint_url",
              llm.endpoint_url);
  pick_string(bindings.model, "CONFSCHED_MODEL", "model", llm.model);
  if (bindings.temperature->count() == 0) {
    if (auto value = env_string("CONFSCHED_TEMPERATURE")) {
      try {
        llm.temperature = std::stod(*value);
      } catch (const std::exception&) {
        throw confsched::Error("CONFSCHED_TEMPERATURE is not a number: " + *value);
      }
    } else if (config.contains("temperature") && config["temperature"].is_number()) {
      llm.temperature = config["temperature"].get<double>();
    }
  }
  if (bindings.max_retries->count() == 0) {
    if (auto value = env_string("CONFSCHED_MAX_RETRIES")) {
      try {
        llm.max_retries = std::stoi(*value);
      } catch (const std::exception&) {
        throw confsched::Error("CONFSCHED_MAX_RETRIES is not an integer: " + *value);
      }
    } else if (config.contains("max_retries") && config["max_retries"].is_number_integer()) {
      llm.max_retries = config["max_retries"].get<int>();
    }
  }
  if (llm.temperature < 0) throw confsched::Error("temperature must be non-negative");
  if (llm.max_retries < 1) throw confsched::Error("max retries must be at least 1");
}

// Null when neither a replay directory nor an endpoint is configured.
std::unique_ptr<confsched::ChatClient> make_client(const LlmOptions& llm) {
  if (!llm.replay_dir.empty())
    return std::make_unique<confsched::ReplayClient>(llm.replay_dir);
  if (!llm.endpoint_url.empty()) {
    confsched::HttpEndpoint endpoint;
    endpoint.url = llm.endpoint_url;
    endpoint.api_key = env_string("CONFSCHED_API_KEY").value_or("");
    return std::make_unique<confsched::HttpChatClient>(std::move(endpoint));
  }
  return nullptr;
}

confsched::ChatRequest make_request(const LlmOptions& llm) {
  confsched::ChatRequest request;
  request.model_name = llm.model;
  request.temperature = llm.temperature;
  request.max_retries = llm.max_retries;
  return request;
}

double parse_cell_double(const std::string& text, const std::string& path) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw confsched::Error("similarity value '" + text + "' in " + path +
                           " is not a number");
  }
}

// Square matrix CSV: header `paper_id,<id>,...`, one row per paper, ids
// covering the instance exactly in any order.
confsched::SimilarityMatrix load_similarity_csv(const std::string& path,
                                                const confsched::Instance& instance) {
  const std::vector<confsched::csv::Row> rows = confsched::csv::read_file(path);
  const std::size_t n = instance.paper_count();
  if (rows.empty()) throw confsched::Error("similarity file is empty: " + path);
  const confsched::csv::Row& header = rows.front();
  if (header.empty() || header[0] != "paper_id")
    throw confsched::Error("similarity file " + path +
                           " must start with a paper_id header column");
  if (header.size() != n + 1 || rows.size() != n + 1)
    throw confsched::Error("similarity file " + path + " must be a " + std::to_string(n) +
                           "x" + std::to_string(n) + " matrix with id headers");
  std::vector<std::size_t> column_paper(n);
  std::vector<bool> seen(n, false);
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto index = instance.paper_index(header[c]);
    if (!index)
      throw confsched::Error("similarity header names unknown paper " + header[c]);
    if (seen[*index])
      throw confsched::Error("similarity header repeats paper " + header[c]);
    seen[*index] = true;
    column_paper[c - 1] = *index;
  }
  std::vector<double> values(n * n, 0.0);
  std::fill(seen.begin(), seen.end(), false);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const confsched::csv::Row& row = rows[r];
    if (row.size() != n + 1)
      throw confsched::Error("similarity row " + std::to_string(r + 1) + " in " + path +
                             " has " + std::to_string(row.size()) + " fields, expected " +
                             std::to_string(n + 1));
    const auto index = instance.paper_index(row[0]);
    if (!index) throw confsched::Error("similarity row names unknown paper " + row[0]);
    if (seen[*index]) throw confsched::Error("similarity file repeats paper " + row[0]);
    seen[*index] = true;
    for (std::size_t c = 1; c < row.size(); ++c)
      values[*index * n + column_paper[c - 1]] = parse_cell_double(row[c], path);
  }
  return confsched::SimilarityMatrix::from_values(n, std::move(values));
}

confsched::Labeling restrict_reference(const confsched::Labeling& reference,
                                       const std::vector<confsched::Paper>& papers) {
  confsched::Labeling out;
  for (const confsched::Paper& paper : papers) {
    const auto it = reference.label.find(paper.id);
    if (it == reference.label.end())
      throw confsched::Error("reference labeling misses paper " + paper.id);
    out.label[paper.id] = it->second;
  }
  return out;
}

std::string trial_output_path(const std::string& base, std::size_t trial,
                              std::size_t trials) {
  if (trials == 1) return base;
  const std::filesystem::path path(base);
  const std::string name =
      path.stem().string() + ".trial" + std::to_string(trial) + path.extension().string();
  return (path.parent_path() / name).string();
}

// Canonical wire form of parsed rows; what llm-schedule persists.
std::string rows_to_wire(const std::vector<confsched::RawScheduleRow>& rows) {
  std::string text = "```\n";
  text += confsched::kScheduleHeader;
  text += '\n';
  for (const confsched::RawScheduleRow& row : rows) {
    text += row.session;
    text += '@';
    text += row.talk_title;
    text += '@';
    text += std::to_string(row.duration);
    text += '\n';
  }
  text += "```\n";
  return text;
}

void print_violations(const GlobalOptions& global, const confsched::ViolationReport& report) {
  std::ostream& out = human(global);
  out << "missing papers: " << report.missing_papers.size() << '\n';
  out << "added sessions: " << report.added_sessions.size() << '\n';
  out << "overfull sessions: " << report.overfull_sessions.size() << " (>10%: "
      << report.sessions_over_10pct << ", >50%: " << report.sessions_over_50pct << ")\n";
  out << "q/a not last: " << report.qa_misplaced.size() << '\n';
  out << "duplicate assignments: " << report.duplicate_assignments.size() << '\n';
}

struct ClusterOptions {
  std::string papers_path;
  std::string method = "tfidf";
  std::string fields = "title";
  int k = 5;
  int trials = 5;
  std::string reference_path;
  LlmOptions llm;
};

int run_cluster(const GlobalOptions& global, const ClusterOptions& opts) {
  if (opts.k < 1) {
    std::cerr << "error: --k must be at least 1\n";
    return kExitUsage;
  }
  if (opts.trials < 1) {
    std::cerr << "error: --trials must be at least 1\n";
    return kExitUsage;
  }
  if (opts.method == "llm" && opts.fields == "title-abstract") {
    std::cerr << "error: chat-model clustering reads titles only; drop --fields\n";
    return kExitUsage;
  }
  const std::vector<confsched::Paper> papers = confsched::load_papers(opts.papers_path);
  std::optional<confsched::Labeling> reference;
  if (!opts.reference_path.empty())
    reference = confsched::load_labeling(opts.reference_path);

  std::vector<confsched::Labeling> labelings;
  std::vector<std::vector<std::string>> repaired;
  std::vector<confsched::ScorePair> per_trial;
  std::optional<confsched::ScorePair> mean;

  if (opts.method == "tfidf") {
    const confsched::TextFields fields = opts.fields == "title-abstract"
                                             ? confsched::TextFields::kTitleAndAbstract
                                             : confsched::TextFields::kTitleOnly;
    std::vector<std::uint64_t> seeds;
    for (int t = 0; t < opts.trials; ++t)
      seeds.push_back(global.seed + static_cast<std::uint64_t>(t));
    confsched::TrialsResult result =
        confsched::run_trials(papers, fields, opts.k, seeds, reference);
    labelings = std::move(result.labelings);
    per_trial = std::move(result.per_trial);
    mean = result.mean;
    repaired.resize(labelings.size());
  } else {
    const std::unique_ptr<confsched::ChatClient> client = make_client(opts.llm);
    if (!client) {
      std::cerr << "error: configure --replay-dir or --endpoint-url (or the matching "
                   "environment/config keys)\n";
      return kExitUsage;
    }
    std::optional<confsched::Labeling> restricted;
    if (reference) restricted = restrict_reference(*reference, papers);
    for (int t = 0; t < opts.trials; ++t) {
      confsched::LlmClusterResult result = confsched::llm_cluster(
          papers, opts.k, *client, make_request(opts.llm),
          global.seed + static_cast<std::uint64_t>(t));
      labelings.push_back(std::move(result.labeling));
      repaired.push_back(std::move(result.repaired_papers));
      if (restricted)
        per_trial.push_back(confsched::homogeneity_completeness(*restricted, labelings.back()));
    }
    if (!per_trial.empty()) {
      confsched::ScorePair sum;
      for (const confsched::ScorePair& scores : per_trial) {
        sum.homogeneity += scores.homogeneity;
        sum.completeness += scores.completeness;
      }
      mean = confsched::ScorePair{sum.homogeneity / per_trial.size(),
                                  sum.completeness / per_trial.size()};
    }
  }

  json trial_results = json::array();
  for (std::size_t t = 0; t < labelings.size(); ++t) {
    json entry = {{"seed", global.seed + t}};
    json labeling = json::object();
    for (const auto& [paper_id, label] : labelings[t].label) labeling[paper_id] = label;
    entry["labeling"] = std::move(labeling);
    if (t < per_trial.size()) entry["scores"] = confsched::to_json(per_trial[t]);
    if (opts.method == "llm") entry["repaired_papers"] = repaired[t];
    if (!global.output.empty()) {
      const std::string path = trial_output_path(global.output, t, labelings.size());
      confsched::save_labeling(path, labelings[t]);
      entry["labeling_path"] = path;
      human(global) << "trial " << t << ": labeling written to " << path << '\n';
    }
    if (t < per_trial.size())
      human(global) << "trial " << t << " (seed " << (global.seed + t)
                    << "): " << format_scores(per_trial[t]) << '\n';
    trial_results.push_back(std::move(entry));
  }
  if (mean)
    human(global) << "mean over " << labelings.size()
                  << " trials: " << format_scores(*mean) << '\n';

  emit_json(global, json{{"method", opts.method},
                         {"fields", opts.fields},
                         {"k", opts.k},
                         {"trials", opts.trials},
                         {"seed", global.seed},
                         {"trial_results", trial_results},
                         {"mean_scores", mean ? confsched::to_json(*mean) : json(nullptr)}});
  return kExitOk;
}

struct SolveOptions {
  std::string papers_path;
  std::string sessions_path;
  std::string labeling_path;
  std::string similarity_path;
  std::optional<double> time_budget;
  bool oracle = false;
};

int run_solve(const GlobalOptions& global, const SolveOptions& opts) {
  if (opts.labeling_path.empty() == opts.similarity_path.empty()) {
    std::cerr << "error: exactly one of --labeling and --similarity is required\n";
    return kExitUsage;
  }
  confsched::Instance instance(confsched::load_papers(opts.papers_path),
                               confsched::load_sessions(opts.sessions_path));
  confsched::SimilarityMatrix sim =
      opts.labeling_path.empty()
          ? load_similarity_csv(opts.similarity_path, instance)
          : confsched::labeling_to_similarity(confsched::load_labeling(opts.labeling_path),
                                              instance);
  const confsched::SolverProblem problem(instance, std::move(sim), opts.time_budget);
  const confsched::SolverResult result = confsched::solve(problem);

  json out = confsched::to_json(result);
  if (opts.oracle) {
    const confsched::SolverResult oracle = confsched::brute_force(problem);
    out["oracle_status"] = confsched::to_string(oracle.status);
    out["oracle_objective"] = oracle.objective ? json(*oracle.objective) : json(nullptr);
    if (result.status == confsched::SolveStatus::kOptimal ||
        result.status == confsched::SolveStatus::kInfeasible) {
      const bool both = result.objective.has_value() && oracle.objective.has_value();
      const bool mismatch =
          both ? std::abs(*result.objective - *oracle.objective) > 1e-9
               : result.objective.has_value() != oracle.objective.has_value();
      if (mismatch) {
        std::cerr << "error: solver and exhaustive oracle disagree on this instance\n";
        emit_json(global, out);
        return kExitFailure;
      }
    }
  }

  if (result.schedule) {
    const confsched::EmittedSchedule emitted =
        confsched::emit_schedule(instance, *result.schedule);
    out["schedule_text"] = emitted.text;
    if (!global.output.empty()) {
      write_text_file(global.output, emitted.text);
      out["schedule_path"] = global.output;
    }
  } else {
    out["schedule_text"] = nullptr;
  }

  std::ostream& log = human(global);
  log << "status: " << confsched::to_string(result.status) << '\n';
  if (result.objective) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.9g", *result.objective);
    log << "objective: " << buffer << '\n';
  }
  {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.9g", result.bound);
    log << "bound: " << buffer << '\n';
  }
  log << "nodes explored: " << result.nodes_explored << '\n';
  if (result.schedule) {
    if (!global.output.empty())
      log << "schedule written to " << global.output << '\n';
    else if (!global.json)
      log << out["schedule_text"].get<std::string>();
  }
  emit_json(global, out);

  switch (result.status) {
    case confsched::SolveStatus::kOptimal:
    case confsched::SolveStatus::kFeasibleIncumbent:
    case confsched::SolveStatus::kTimeoutWithIncumbent:
      return kExitOk;
    case confsched::SolveStatus::kInfeasible:
      return kExitInfeasible;
    case confsched::SolveStatus::kTimeoutNoIncumbent:
      return kExitTimeout;
  }
  return kExitFailure;
}

struct LlmScheduleOptions {
  std::string papers_path;
  std::string sessions_path;
  std::string reference_path;
  int papers_per_session = 0;  // 0 disables downsampling
  std::string transcript_path = "transcript.jsonl";
  LlmOptions llm;
};

int run_llm_schedule(const GlobalOptions& global, const LlmScheduleOptions& opts) {
  confsched::Instance instance(confsched::load_papers(opts.papers_path),
                               confsched::load_sessions(opts.sessions_path));
  if (opts.papers_per_session > 0) {
    if (opts.reference_path.empty()) {
      std::cerr << "error: --papers-per-session needs --reference to know the sessions'"
                   " populations\n";
      return kExitUsage;
    }
    const confsched::Schedule reference =
        confsched::load_schedule_file(opts.reference_path, instance);
    confsched::DownsampledInstance down =
        confsched::downsample(instance, reference, opts.papers_per_session, global.seed);
    instance = std::move(down.instance);
    human(global) << "downsampled to " << instance.paper_count() << " papers\n";
  }
  const std::unique_ptr<confsched::ChatClient> client = make_client(opts.llm);
  if (!client) {
    std::cerr << "error: configure --replay-dir or --endpoint-url (or the matching "
                 "environment/config keys)\n";
    return kExitUsage;
  }

  confsched::ZeroShotResult result;
  try {
    result = confsched::zero_shot_schedule(instance, *client, make_request(opts.llm),
                                           global.seed);
  } catch (const confsched::LlmRunError& error) {
    write_text_file(opts.transcript_path, confsched::transcript_to_jsonl(error.transcript()));
    std::cerr << "error: " << error.what() << " (transcript at " << opts.transcript_path
              << ")\n";
    return error.transport() ? kExitTransport : kExitFailure;
  }
  write_text_file(opts.transcript_path, confsched::transcript_to_jsonl(result.transcript));

  json out = {{"violations", confsched::to_json(result.violations)},
              {"resolution", confsched::to_json(result.resolution)},
              {"unparseable", result.unparseable},
              {"attempts", result.attempts},
              {"transcript_path", opts.transcript_path}};
  if (!result.unparseable) {
    const std::string wire = rows_to_wire(result.rows);
    out["schedule_text"] = wire;
    if (!global.output.empty()) {
      write_text_file(global.output, wire);
      out["schedule_path"] = global.output;
      human(global) << "schedule written to " << global.output << '\n';
    }
  } else {
    out["schedule_text"] = nullptr;
    human(global) << "no fenced schedule block in any response\n";
  }
  human(global) << "attempts: " << result.attempts << '\n';
  print_violations(global, result.violations);
  emit_json(global, out);
  return kExitOk;
}

struct EvaluateOptions {
  std::string papers_path;
  std::string sessions_path;
  std::string reference_path;
  std::string candidate_path;
};

int run_evaluate(const GlobalOptions& global, const EvaluateOptions& opts) {
  confsched::Instance instance(confsched::load_papers(opts.papers_path),
                               confsched::load_sessions(opts.sessions_path));
  const confsched::Schedule reference =
      confsched::load_schedule_file(opts.reference_path, instance);
  const std::string candidate_text = read_text_file(opts.candidate_path);
  const confsched::ParsedScheduleBlock block = confsched::parse_schedule_block(candidate_text);
  const confsched::Resolution resolved = confsched::resolve_titles(block.rows, instance);
  const confsched::ViolationReport violations =
      confsched::violation_report(instance, block.rows, resolved);

  std::optional<confsched::ScorePair> scores;
  bool overlap = false;
  for (const auto& [paper_id, session_id] : resolved.schedule.assignment) {
    (void)session_id;
    if (reference.assignment.count(paper_id) > 0) {
      overlap = true;
      break;
    }
  }
  if (overlap) scores = confsched::schedule_scores(reference, resolved.schedule, instance);

  if (scores)
    human(global) << format_scores(*scores) << '\n';
  else
    human(global) << "scores unavailable: candidate shares no papers with the reference\n";
  if (!block.fence_found) human(global) << "candidate has no fenced schedule block\n";
  print_violations(global, violations);

  const json out = {{"scores", scores ? confsched::to_json(*scores) : json(nullptr)},
                    {"violations", confsched::to_json(violations)},
                    {"resolution", confsched::to_json(resolved.report)},
                    {"unparseable", !block.fence_found}};
  emit_json(global, out);
  if (!global.output.empty()) write_text_file(global.output, out.dump(2) + "\n");
  return kExitOk;
}

struct IngestCheckOptions {
  std::string papers_path;
  std::string sessions_path;
  std::string labeling_path;
  std::string reference_path;
};

int run_ingest_check(const GlobalOptions& global, const IngestCheckOptions& opts) {
  json report = json::object();
  const std::vector<confsched::Paper> papers = confsched::load_papers(opts.papers_path);
  int total_duration = 0;
  std::size_t qa_papers = 0;
  for (const confsched::Paper& paper : papers) {
    total_duration += paper.duration;
    if (confsched::is_qa_title(paper.title)) ++qa_papers;
  }
  report["papers"] = {{"path", opts.papers_path},
                      {"count", papers.size()},
                      {"total_duration", total_duration},
                      {"qa_titled", qa_papers}};
  human(global) << papers.size() << " papers, total duration " << total_duration << '\n';

  std::optional<confsched::Instance> instance;
  if (!opts.sessions_path.empty()) {
    std::vector<confsched::Session> sessions = confsched::load_sessions(opts.sessions_path);
    int total_capacity = 0;
    for (const confsched::Session& session : sessions) total_capacity += session.length;
    instance.emplace(papers, std::move(sessions));
    const bool fits = total_capacity >= total_duration;
    report["sessions"] = {{"path", opts.sessions_path},
                          {"count", instance->session_count()},
                          {"total_capacity", total_capacity},
                          {"capacity_covers_duration", fits}};
    human(global) << instance->session_count() << " sessions, total capacity "
                  << total_capacity << (fits ? "" : " (less than the papers need)") << '\n';
  }
  if (!opts.labeling_path.empty()) {
    const confsched::Labeling labeling = confsched::load_labeling(opts.labeling_path);
    std::vector<std::string> unlabeled;
    for (const confsched::Paper& paper : papers)
      if (labeling.label.find(paper.id) == labeling.label.end()) unlabeled.push_back(paper.id);
    report["labeling"] = {{"path", opts.labeling_path},
                          {"count", labeling.label.size()},
                          {"unlabeled_papers", unlabeled}};
    human(global) << labeling.label.size() << " labeled papers, " << unlabeled.size()
                  << " instance papers unlabeled\n";
  }
  if (!opts.reference_path.empty()) {
    if (!instance) {
      std::cerr << "error: --reference needs --sessions\n";
      return kExitUsage;
    }
    const confsched::Schedule reference =
        confsched::load_schedule_file(opts.reference_path, *instance);
    const confsched::FeasibilityReport feasibility =
        confsched::check_feasible(*instance, reference);
    report["reference"] = {{"path", opts.reference_path},
                           {"assigned_papers", reference.assignment.size()},
                           {"feasibility", confsched::to_json(feasibility)}};
    human(global) << "reference schedule assigns " << reference.assignment.size()
                  << " papers, feasible: " << (feasibility.ok ? "yes" : "no") << '\n';
  }
  emit_json(global, report);
  if (!global.output.empty()) write_text_file(global.output, report.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conference session assignment: clustering, exact solving, zero-shot "
               "scheduling and schedule evaluation"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Base seed for every randomized step")
      ->capture_default_str();
  app.add_flag("--json", global.json,
               "Print machine-readable JSON on stdout; human text moves to stderr");
  app.add_option("--output", global.output,
                 "Primary output file: labeling CSV (cluster), schedule (solve, "
                 "llm-schedule), JSON report (evaluate, ingest-check)");
  app.add_option("--config", global.config_path,
                 "JSON config file; flags beat environment, environment beats config");

  ClusterOptions cluster_opts;
  CLI::App* cluster = app.add_subcommand("cluster", "Cluster papers by text similarity");
  cluster->fallthrough();
  cluster->add_option("--papers", cluster_opts.papers_path, "Papers CSV")->required();
  cluster->add_option("--method", cluster_opts.method, "Clustering method")
      ->check(CLI::IsMember({"tfidf", "llm"}))
      ->capture_default_str();
  cluster->add_option("--fields", cluster_opts.fields, "Text fed to TFIDF")
      ->check(CLI::IsMember({"title", "title-abstract"}))
      ->capture_default_str();
  cluster->add_option("--k", cluster_opts.k, "Cluster count")->capture_default_str();
  cluster->add_option("--trials", cluster_opts.trials, "Seeded trials to run")
      ->capture_default_str();
  cluster->add_option("--reference", cluster_opts.reference_path,
                      "Reference labeling CSV for homogeneity/completeness");
  const LlmOptionBindings cluster_llm = add_llm_options(cluster, cluster_opts.llm);

  SolveOptions solve_opts;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve the session assignment exactly");
  solve_cmd->fallthrough();
  solve_cmd->add_option("--papers", solve_opts.papers_path, "Papers CSV")->required();
  solve_cmd->add_option("--sessions", solve_opts.sessions_path, "Sessions CSV")->required();
  solve_cmd->add_option("--labeling", solve_opts.labeling_path,
                        "Labeling CSV; same-cluster pairs get similarity 1");
  solve_cmd->add_option("--similarity", solve_opts.similarity_path,
                        "Similarity matrix CSV (paper_id header row and column)");
  solve_cmd->add_option("--time-budget", solve_opts.time_budget,
                        "Seconds before the search stops with its best incumbent");
  solve_cmd->add_flag("--oracle", solve_opts.oracle,
                      "Also run the exhaustive oracle and cross-check (small instances)");

  LlmScheduleOptions llm_opts;
  CLI::App* llm_schedule =
      app.add_subcommand("llm-schedule", "Ask a chat model for a schedule and score it");
  llm_schedule->fallthrough();
  llm_schedule->add_option("--papers", llm_opts.papers_path, "Papers CSV")->required();
  llm_schedule->add_option("--sessions", llm_opts.sessions_path, "Sessions CSV")->required();
  llm_schedule->add_option("--reference", llm_opts.reference_path,
                           "Reference schedule (wire format); required for downsampling");
  llm_schedule->add_option("--papers-per-session", llm_opts.papers_per_session,
                           "Downsample each reference session to this many papers");
  llm_schedule->add_option("--transcript", llm_opts.transcript_path,
                           "Where to write the JSONL transcript")
      ->capture_default_str();
  const LlmOptionBindings llm_schedule_llm = add_llm_options(llm_schedule, llm_opts.llm);

  EvaluateOptions evaluate_opts;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Score a candidate schedule against a reference schedule");
  evaluate->fallthrough();
  evaluate->add_option("--papers", evaluate_opts.papers_path, "Papers CSV")->required();
  evaluate->add_option("--sessions", evaluate_opts.sessions_path, "Sessions CSV")->required();
  evaluate->add_option("--reference", evaluate_opts.reference_path,
                       "Reference schedule (wire format, strictly parsed)")
      ->required();
  evaluate->add_option("--candidate", evaluate_opts.candidate_path,
                       "Candidate schedule (parsed leniently)")
      ->required();

  IngestCheckOptions ingest_opts;
  CLI::App* ingest_check =
      app.add_subcommand("ingest-check", "Validate input files and summarize them");
  ingest_check->fallthrough();
  ingest_check->add_option("--papers", ingest_opts.papers_path, "Papers CSV")->required();
  ingest_check->add_option("--sessions", ingest_opts.sessions_path, "Sessions CSV");
  ingest_check->add_option("--labeling", ingest_opts.labeling_path, "Labeling CSV");
  ingest_check->add_option("--reference", ingest_opts.reference_path,
                           "Reference schedule (wire format)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (cluster->parsed()) {
      finish_llm_options(cluster_llm, global.config_path, cluster_opts.llm);
      return run_cluster(global, cluster_opts);
    }
    if (solve_cmd->parsed()) return run_solve(global, solve_opts);
    if (llm_schedule->parsed()) {
      finish_llm_options(llm_schedule_llm, global.config_path, llm_opts.llm);
      return run_llm_schedule(global, llm_opts);
    }
    if (evaluate->parsed()) return run_evaluate(global, evaluate_opts);
    if (ingest_check->parsed()) return run_ingest_check(global, ingest_opts);
  } catch (const confsched::LlmRunError& error) {
    std::cerr << "error: " << error.what() << '\n';
    return error.transport() ? kExitTransport : kExitFailure;
  } catch (const confsched::Error& error) {
    std::cerr << "error: " << error.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
