#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "confsched/core.hpp"
#include "confsched/ingest.hpp"
#include "confsched/llm.hpp"
#include "confsched/rng.hpp"
#include "helpers.hpp"

using namespace confsched;
using nlohmann::json;
namespace fs = std::filesystem;
using testutil::run_cli;

namespace {

// Four interchangeable papers, two sessions that force a 2+2 split.
const char* kPapersCsv =
    "id,title,abstract,duration\n"
    "p0,Graph Mining at Scale,,5\n"
    "p1,Release Pipelines in Practice,,5\n"
    "p2,Energy Aware Compilers,,5\n"
    "p3,Latency Budgets for Mobile Apps,,5\n";

const char* kSessionsCsv =
    "id,title,length\n"
    "s0,Morning,10\n"
    "s1,Afternoon,10\n";

const char* kLabelsCsv =
    "paper_id,cluster\n"
    "p0,0\n"
    "p1,0\n"
    "p2,1\n"
    "p3,1\n";

Instance cli_instance() {
  return Instance({{"p0", "Graph Mining at Scale", {}, 5},
                   {"p1", "Release Pipelines in Practice", {}, 5},
                   {"p2", "Energy Aware Compilers", {}, 5},
                   {"p3", "Latency Budgets for Mobile Apps", {}, 5}},
                  {{"s0", "Morning", 10}, {"s1", "Afternoon", 10}});
}

fs::path standard_dir(const std::string& tag) {
  const fs::path dir = testutil::make_temp_dir(tag);
  testutil::write_file(dir / "papers.csv", kPapersCsv);
  testutil::write_file(dir / "sessions.csv", kSessionsCsv);
  testutil::write_file(dir / "labels.csv", kLabelsCsv);
  return dir;
}

Schedule paired_schedule() {
  Schedule schedule;
  schedule.assignment = {{"p0", "s0"}, {"p1", "s0"}, {"p2", "s1"}, {"p3", "s1"}};
  return schedule;
}

// Clustering corpus with two disjoint vocabulary groups.
const char* kCorpusCsv =
    "id,title,abstract,duration\n"
    "p0,neural networks language modeling,,5\n"
    "p1,transformer neural language models,,5\n"
    "p2,language modeling neural transformers,,5\n"
    "p3,soil irrigation dry crops,,5\n"
    "p4,crop harvest soil moisture,,5\n"
    "p5,irrigation moisture harvest yield,,5\n";

const char* kCorpusLabels =
    "paper_id,cluster\n"
    "p0,0\np1,0\np2,0\np3,1\np4,1\np5,1\n";

}  // namespace

TEST_CASE("solve finds the optimum, agrees with its oracle and emits JSON") {
  const fs::path dir = standard_dir("cli-solve");
  const auto result = run_cli({"--json", "solve", "--papers", "papers.csv", "--sessions",
                               "sessions.csv", "--labeling", "labels.csv", "--oracle"},
                              dir);
  REQUIRE(result.exit_code == 0);

  const json out = json::parse(result.out);
  CHECK(out.at("status") == "optimal");
  CHECK(out.at("objective").get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(out.at("bound").get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(out.at("oracle_status") == "optimal");
  CHECK(out.at("oracle_objective").get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  REQUIRE(out.at("assignment").is_object());
  CHECK(out.at("assignment").size() == 4);
  CHECK(out.at("assignment").at("p0") == out.at("assignment").at("p1"));
  CHECK(out.at("assignment").at("p2") == out.at("assignment").at("p3"));
  CHECK(out.at("assignment").at("p0") != out.at("assignment").at("p2"));
  REQUIRE(out.at("schedule_text").is_string());
  CHECK(out.at("schedule_text").get<std::string>().find("session@talk_title@duration") !=
        std::string::npos);
}

TEST_CASE("solve prints a human summary and the schedule without --json") {
  const fs::path dir = standard_dir("cli-solve-human");
  const auto result = run_cli({"solve", "--papers", "papers.csv", "--sessions",
                               "sessions.csv", "--labeling", "labels.csv"},
                              dir);
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("status: optimal") != std::string::npos);
  CHECK(result.out.find("objective: 2") != std::string::npos);
  CHECK(result.out.find("```\nsession@talk_title@duration\n") != std::string::npos);
  CHECK(result.err.empty());
}

TEST_CASE("solve --output writes a loadable schedule file") {
  const fs::path dir = standard_dir("cli-solve-output");
  const auto result = run_cli({"--output", "schedule.txt", "solve", "--papers", "papers.csv",
                               "--sessions", "sessions.csv", "--labeling", "labels.csv"},
                              dir);
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("schedule written to schedule.txt") != std::string::npos);
  const Schedule loaded = load_schedule_file((dir / "schedule.txt").string(), cli_instance());
  CHECK(loaded.assignment.size() == 4);
  CHECK(loaded.assignment.at("p0") == loaded.assignment.at("p1"));
}

TEST_CASE("solve accepts a similarity matrix with ids in any order") {
  const fs::path dir = testutil::make_temp_dir("cli-solve-sim");
  testutil::write_file(dir / "papers.csv",
                       "id,title,abstract,duration\n"
                       "pa,Alpha Paper,,5\npb,Beta Paper,,5\npc,Gamma Paper,,5\n");
  testutil::write_file(dir / "sessions.csv", "id,title,length\ns0,All,15\n");
  testutil::write_file(dir / "sim.csv",
                       "paper_id,pb,pa,pc\n"
                       "pa,0.5,0,0.25\n"
                       "pb,0,0.5,0\n"
                       "pc,0,0.25,0\n");
  const auto result = run_cli({"--json", "solve", "--papers", "papers.csv", "--sessions",
                               "sessions.csv", "--similarity", "sim.csv"},
                              dir);
  REQUIRE(result.exit_code == 0);
  const json out = json::parse(result.out);
  // Everything fits in one session, so the objective is the full pair sum.
  CHECK(out.at("objective").get<double>() == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("solve exits 3 on infeasible instances") {
  const fs::path dir = testutil::make_temp_dir("cli-infeasible");
  testutil::write_file(dir / "papers.csv",
                       "id,title,abstract,duration\np0,First Talk,,6\np1,Second Talk,,6\n");
  testutil::write_file(dir / "sessions.csv", "id,title,length\ns0,Only,10\n");
  testutil::write_file(dir / "labels.csv", "paper_id,cluster\np0,0\np1,0\n");
  const auto result = run_cli({"--json", "solve", "--papers", "papers.csv", "--sessions",
                               "sessions.csv", "--labeling", "labels.csv"},
                              dir);
  CHECK(result.exit_code == 3);
  const json out = json::parse(result.out);
  CHECK(out.at("status") == "infeasible");
  CHECK(out.at("schedule_text").is_null());
  CHECK(out.at("assignment").is_null());
}

TEST_CASE("solve exits 4 when the budget expires before any incumbent") {
  const fs::path dir = testutil::make_temp_dir("cli-timeout");
  // First-fit-decreasing strands this instance, so a zero budget leaves
  // nothing but the timeout classification.
  testutil::write_file(dir / "papers.csv",
                       "id,title,abstract,duration\n"
                       "p0,Long Talk,,4\np1,Medium One,,3\np2,Medium Two,,3\n");
  testutil::write_file(dir / "sessions.csv", "id,title,length\ns0,Big,6\ns1,Small,4\n");
  testutil::write_file(dir / "labels.csv", "paper_id,cluster\np0,0\np1,0\np2,0\n");
  const auto result = run_cli({"--json", "solve", "--papers", "papers.csv", "--sessions",
                               "sessions.csv", "--labeling", "labels.csv", "--time-budget",
                               "0"},
                              dir);
  CHECK(result.exit_code == 4);
  const json out = json::parse(result.out);
  CHECK(out.at("status") == "timeout-no-incumbent");
}

TEST_CASE("solve usage errors exit 2") {
  const fs::path dir = standard_dir("cli-usage");

  auto both = run_cli({"solve", "--papers", "papers.csv", "--sessions", "sessions.csv",
                       "--labeling", "labels.csv", "--similarity", "labels.csv"},
                      dir);
  CHECK(both.exit_code == 2);
  CHECK(both.err.find("exactly one of --labeling and --similarity") != std::string::npos);

  auto neither = run_cli({"solve", "--papers", "papers.csv", "--sessions", "sessions.csv"}, dir);
  CHECK(neither.exit_code == 2);

  auto missing_file = run_cli({"solve", "--papers", "no_such.csv", "--sessions",
                               "sessions.csv", "--labeling", "labels.csv"},
                              dir);
  CHECK(missing_file.exit_code == 2);
  CHECK(missing_file.err.find("no_such.csv") != std::string::npos);

  auto bad_flag = run_cli({"solve", "--papers", "papers.csv", "--sessions", "sessions.csv",
                           "--labeling", "labels.csv", "--frobnicate"},
                          dir);
  CHECK(bad_flag.exit_code == 2);

  auto no_subcommand = run_cli({"--json"}, dir);
  CHECK(no_subcommand.exit_code == 2);

  auto bad_method = run_cli({"cluster", "--papers", "papers.csv", "--method", "magic"}, dir);
  CHECK(bad_method.exit_code == 2);
}

TEST_CASE("tfidf clustering is reproducible byte for byte") {
  const fs::path dir = testutil::make_temp_dir("cli-cluster");
  testutil::write_file(dir / "papers.csv", kCorpusCsv);
  testutil::write_file(dir / "labels.csv", kCorpusLabels);

  const std::vector<std::string> args = {"--json",   "--seed",     "5",
                                         "cluster",  "--papers",   "papers.csv",
                                         "--method", "tfidf",      "--k",
                                         "2",        "--trials",   "3",
                                         "--reference", "labels.csv"};
  const auto first = run_cli(args, dir);
  const auto second = run_cli(args, dir);
  REQUIRE(first.exit_code == 0);
  CHECK(first.out == second.out);
  CHECK(first.err == second.err);

  const json out = json::parse(first.out);
  CHECK(out.at("method") == "tfidf");
  CHECK(out.at("k") == 2);
  CHECK(out.at("seed") == 5);
  REQUIRE(out.at("trial_results").size() == 3);
  for (std::size_t t = 0; t < 3; ++t) {
    const json& trial = out.at("trial_results").at(t);
    CHECK(trial.at("seed") == 5 + t);
    REQUIRE(trial.at("labeling").is_object());
    CHECK(trial.at("labeling").size() == 6);
    for (const auto& [paper, label] : trial.at("labeling").items()) {
      CHECK(label.get<int>() >= 0);
      CHECK(label.get<int>() < 2);
    }
    CHECK(trial.at("scores").contains("homogeneity"));
  }
  REQUIRE(out.at("mean_scores").is_object());
  const double mean_h = out.at("mean_scores").at("homogeneity").get<double>();
  double sum_h = 0.0;
  for (const auto& trial : out.at("trial_results"))
    sum_h += trial.at("scores").at("homogeneity").get<double>();
  CHECK(mean_h == doctest::Approx(sum_h / 3.0).epsilon(1e-9));

  // Human-readable score lines land on stderr in JSON mode.
  CHECK(first.err.find("trial 0 (seed 5):") != std::string::npos);
  CHECK(first.err.find("mean over 3 trials:") != std::string::npos);
}

TEST_CASE("cluster --output writes one labeling per trial") {
  const fs::path dir = testutil::make_temp_dir("cli-cluster-out");
  testutil::write_file(dir / "papers.csv", kCorpusCsv);

  const auto single = run_cli({"--output", "out.csv", "cluster", "--papers", "papers.csv",
                               "--k", "2", "--trials", "1"},
                              dir);
  REQUIRE(single.exit_code == 0);
  CHECK(load_labeling((dir / "out.csv").string()).label.size() == 6);

  const auto multi = run_cli({"--output", "out.csv", "cluster", "--papers", "papers.csv",
                              "--k", "2", "--trials", "2"},
                             dir);
  REQUIRE(multi.exit_code == 0);
  CHECK(load_labeling((dir / "out.trial0.csv").string()).label.size() == 6);
  CHECK(load_labeling((dir / "out.trial1.csv").string()).label.size() == 6);
}

TEST_CASE("chat-model clustering needs a transport and rejects abstracts") {
  const fs::path dir = testutil::make_temp_dir("cli-cluster-llm-usage");
  testutil::write_file(dir / "papers.csv", kCorpusCsv);

  const auto no_client = run_cli({"cluster", "--papers", "papers.csv", "--method", "llm"}, dir);
  CHECK(no_client.exit_code == 2);
  CHECK(no_client.err.find("--replay-dir or --endpoint-url") != std::string::npos);

  const auto abstracts = run_cli({"cluster", "--papers", "papers.csv", "--method", "llm",
                                  "--fields", "title-abstract", "--replay-dir", "."},
                                 dir);
  CHECK(abstracts.exit_code == 2);
  CHECK(abstracts.err.find("titles only") != std::string::npos);
}

TEST_CASE("chat-model clustering replays recorded responses deterministically") {
  const fs::path dir = testutil::make_temp_dir("cli-cluster-llm");
  testutil::write_file(dir / "papers.csv", kCorpusCsv);
  testutil::write_file(dir / "labels.csv", kCorpusLabels);
  const fs::path replays = dir / "replays";
  fs::create_directories(replays);

  const std::vector<Paper> papers = load_papers((dir / "papers.csv").string());
  const ReplayClient recorder(replays.string());
  const std::string response =
      "```\n"
      "title@cluster\n"
      "neural networks language modeling@0\n"
      "transformer neural language models@0\n"
      "language modeling neural transformers@0\n"
      "soil irrigation dry crops@1\n"
      "crop harvest soil moisture@1\n"
      "irrigation moisture harvest yield@1\n"
      "```\n";
  for (std::uint64_t seed = 9; seed < 11; ++seed) {
    recorder.record(build_cluster_prompt(papers, 2, seed), response);
  }

  const std::vector<std::string> args = {"--json",  "--seed",   "9",
                                         "cluster", "--papers", "papers.csv",
                                         "--method", "llm",     "--k",
                                         "2",       "--trials", "2",
                                         "--replay-dir", "replays",
                                         "--reference",  "labels.csv"};
  const auto first = run_cli(args, dir);
  REQUIRE(first.exit_code == 0);
  const auto second = run_cli(args, dir);
  CHECK(first.out == second.out);

  const json out = json::parse(first.out);
  REQUIRE(out.at("trial_results").size() == 2);
  for (const auto& trial : out.at("trial_results")) {
    CHECK(trial.at("repaired_papers").empty());
    CHECK(trial.at("scores").at("homogeneity").get<double>() ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(trial.at("scores").at("completeness").get<double>() ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(out.at("mean_scores").at("homogeneity").get<double>() ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("llm-schedule replays a recorded run offline") {
  const fs::path dir = standard_dir("cli-llm-schedule");
  const fs::path replays = dir / "replays";
  fs::create_directories(replays);

  const Instance instance = cli_instance();
  const ReplayClient recorder(replays.string());
  recorder.record(build_schedule_prompt(instance, 0),
                  "Sure!\n" + emit_schedule(instance, paired_schedule()).text + "Done.\n");

  const std::vector<std::string> args = {"--json",
                                         "llm-schedule",
                                         "--papers",
                                         "papers.csv",
                                         "--sessions",
                                         "sessions.csv",
                                         "--replay-dir",
                                         "replays",
                                         "--transcript",
                                         "transcript.jsonl"};
  const auto first = run_cli(args, dir);
  REQUIRE(first.exit_code == 0);

  const json out = json::parse(first.out);
  CHECK(out.at("attempts") == 1);
  CHECK(out.at("unparseable") == false);
  CHECK(out.at("violations").at("clean") == true);
  CHECK(out.at("violations").at("missing_paper_count") == 0);
  REQUIRE(out.at("schedule_text").is_string());
  CHECK(out.at("transcript_path") == "transcript.jsonl");

  REQUIRE(fs::exists(dir / "transcript.jsonl"));
  const std::string transcript = testutil::read_file(dir / "transcript.jsonl");
  const json entry = json::parse(transcript.substr(0, transcript.find('\n')));
  CHECK(entry.at("attempt") == 1);
  CHECK(entry.at("timestamp") == "");

  // The reconstructed wire text round-trips through the lenient parser.
  const ParsedScheduleBlock parsed =
      parse_schedule_block(out.at("schedule_text").get<std::string>());
  CHECK(parsed.defects.empty());
  CHECK(parsed.rows.size() == 4);

  const auto second = run_cli(args, dir);
  CHECK(first.out == second.out);
}

TEST_CASE("llm-schedule exits 5 when every transport attempt fails") {
  const fs::path dir = standard_dir("cli-llm-transport");
  fs::create_directories(dir / "empty_replays");
  const auto result = run_cli({"--json", "llm-schedule", "--papers", "papers.csv",
                               "--sessions", "sessions.csv", "--replay-dir", "empty_replays",
                               "--max-retries", "2", "--transcript", "t.jsonl"},
                              dir);
  CHECK(result.exit_code == 5);
  CHECK(result.err.find("transcript at t.jsonl") != std::string::npos);
  REQUIRE(fs::exists(dir / "t.jsonl"));
  // One JSONL line per failed attempt.
  const std::string transcript = testutil::read_file(dir / "t.jsonl");
  CHECK(std::count(transcript.begin(), transcript.end(), '\n') == 2);
}

TEST_CASE("llm-schedule needs some transport configured") {
  const fs::path dir = standard_dir("cli-llm-noclient");
  const auto result =
      run_cli({"llm-schedule", "--papers", "papers.csv", "--sessions", "sessions.csv"}, dir);
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("--replay-dir or --endpoint-url") != std::string::npos);
}

TEST_CASE("llm-schedule downsamples against a reference schedule") {
  const fs::path dir = standard_dir("cli-llm-downsample");
  const Instance instance = cli_instance();
  testutil::write_file(dir / "reference.txt", emit_schedule(instance, paired_schedule()).text);

  const auto missing_ref = run_cli({"llm-schedule", "--papers", "papers.csv", "--sessions",
                                    "sessions.csv", "--papers-per-session", "1",
                                    "--replay-dir", "."},
                                   dir);
  CHECK(missing_ref.exit_code == 2);
  CHECK(missing_ref.err.find("--papers-per-session needs --reference") != std::string::npos);

  const DownsampledInstance down = downsample(instance, paired_schedule(), 1, 0);
  const fs::path replays = dir / "replays";
  fs::create_directories(replays);
  const ReplayClient recorder(replays.string());
  recorder.record(build_schedule_prompt(down.instance, 0),
                  emit_schedule(down.instance, down.reference).text);

  const auto result = run_cli({"--json", "llm-schedule", "--papers", "papers.csv",
                               "--sessions", "sessions.csv", "--reference", "reference.txt",
                               "--papers-per-session", "1", "--replay-dir", "replays"},
                              dir);
  REQUIRE(result.exit_code == 0);
  CHECK(result.err.find("downsampled to 2 papers") != std::string::npos);
  const json out = json::parse(result.out);
  CHECK(out.at("violations").at("clean") == true);
}

TEST_CASE("replay directory resolves as flag, then environment, then config") {
  const fs::path dir = standard_dir("cli-llm-precedence");
  const Instance instance = cli_instance();
  const fs::path good = dir / "good_replays";
  const fs::path empty = dir / "empty_replays";
  fs::create_directories(good);
  fs::create_directories(empty);
  const ReplayClient recorder(good.string());
  recorder.record(build_schedule_prompt(instance, 0),
                  emit_schedule(instance, paired_schedule()).text);

  const std::vector<std::string> base = {"--json", "llm-schedule", "--papers", "papers.csv",
                                         "--sessions", "sessions.csv", "--transcript",
                                         "t.jsonl"};

  // Environment alone is enough.
  auto env_only = run_cli(base, dir, "CONFSCHED_REPLAY_DIR='" + good.string() + "'");
  CHECK(env_only.exit_code == 0);

  // The flag beats an environment variable pointing at an empty store.
  std::vector<std::string> with_flag = base;
  with_flag.insert(with_flag.end(), {"--replay-dir", good.string()});
  auto flag_wins = run_cli(with_flag, dir, "CONFSCHED_REPLAY_DIR='" + empty.string() + "'");
  CHECK(flag_wins.exit_code == 0);

  // The environment beats the config file.
  testutil::write_file(dir / "config.json",
                       std::string("{\"replay_dir\": \"") + empty.string() + "\"}\n");
  std::vector<std::string> with_config = base;
  with_config.insert(with_config.end(), {"--config", "config.json"});
  auto env_beats_config =
      run_cli(with_config, dir, "CONFSCHED_REPLAY_DIR='" + good.string() + "'");
  CHECK(env_beats_config.exit_code == 0);

  // The config file alone also works.
  testutil::write_file(dir / "good_config.json",
                       std::string("{\"replay_dir\": \"") + good.string() + "\"}\n");
  auto config_only = run_cli({"--json", "llm-schedule", "--papers", "papers.csv",
                              "--sessions", "sessions.csv", "--transcript", "t.jsonl",
                              "--config", "good_config.json"},
                             dir);
  CHECK(config_only.exit_code == 0);

  // And the empty store by itself fails on transport.
  auto empty_store = run_cli(base, dir, "CONFSCHED_REPLAY_DIR='" + empty.string() + "'");
  CHECK(empty_store.exit_code == 5);
}

TEST_CASE("evaluate scores a candidate against the reference") {
  const fs::path dir = standard_dir("cli-evaluate");
  const Instance instance = cli_instance();
  testutil::write_file(dir / "reference.txt", emit_schedule(instance, paired_schedule()).text);

  SUBCASE("an identical candidate is perfect and clean") {
    testutil::write_file(dir / "candidate.txt",
                         emit_schedule(instance, paired_schedule()).text);
    const auto result = run_cli({"--json", "evaluate", "--papers", "papers.csv", "--sessions",
                                 "sessions.csv", "--reference", "reference.txt",
                                 "--candidate", "candidate.txt"},
                                dir);
    REQUIRE(result.exit_code == 0);
    const json out = json::parse(result.out);
    CHECK(out.at("scores").at("homogeneity").get<double>() ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(out.at("scores").at("completeness").get<double>() ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(out.at("violations").at("clean") == true);
    CHECK(out.at("unparseable") == false);
  }

  SUBCASE("moving one paper yields the hand-derived scores") {
    Schedule moved = paired_schedule();
    moved.assignment["p2"] = "s0";
    testutil::write_file(dir / "candidate.txt", emit_schedule(instance, moved).text);
    const auto result = run_cli({"--json", "evaluate", "--papers", "papers.csv", "--sessions",
                                 "sessions.csv", "--reference", "reference.txt",
                                 "--candidate", "candidate.txt"},
                                dir);
    REQUIRE(result.exit_code == 0);
    const json out = json::parse(result.out);
    const double ln2 = std::log(2.0);
    const double ln3 = std::log(3.0);
    CHECK(out.at("scores").at("homogeneity").get<double>() ==
          doctest::Approx(1.0 - (0.75 * ln3 - 0.5 * ln2) / ln2).epsilon(1e-9));
    CHECK(out.at("scores").at("completeness").get<double>() ==
          doctest::Approx(1.0 - 0.5 * ln2 / (2.0 * ln2 - 0.75 * ln3)).epsilon(1e-9));
    // Three five-minute talks in a ten-minute session: 50% over.
    CHECK(out.at("violations").at("overfull_sessions").size() == 1);
    CHECK(out.at("violations").at("sessions_over_10pct") == 1);
    CHECK(out.at("violations").at("sessions_over_50pct") == 0);
  }

  SUBCASE("rows naming unknown sessions count as added") {
    testutil::write_file(dir / "candidate.txt",
                         "```\n"
                         "session@talk_title@duration\n"
                         "s9@Graph Mining at Scale@5\n"
                         "s0@Release Pipelines in Practice@5\n"
                         "```\n");
    const auto result = run_cli({"--json", "evaluate", "--papers", "papers.csv", "--sessions",
                                 "sessions.csv", "--reference", "reference.txt",
                                 "--candidate", "candidate.txt"},
                                dir);
    REQUIRE(result.exit_code == 0);
    const json out = json::parse(result.out);
    CHECK(out.at("violations").at("added_sessions") == json::array({"s9"}));
    CHECK(out.at("violations").at("added_session_count") == 1);
    // Both rows match papers by title (the s9 one included), so only the
    // papers with no row at all are missing.
    CHECK(out.at("violations").at("missing_paper_count") == 2);
  }

  SUBCASE("a fence-less candidate still evaluates, marked unparseable") {
    testutil::write_file(dir / "candidate.txt", "no schedule here, sorry\n");
    const auto result = run_cli({"--json", "--output", "report.json", "evaluate", "--papers",
                                 "papers.csv", "--sessions", "sessions.csv", "--reference",
                                 "reference.txt", "--candidate", "candidate.txt"},
                                dir);
    REQUIRE(result.exit_code == 0);
    const json out = json::parse(result.out);
    CHECK(out.at("unparseable") == true);
    CHECK(out.at("scores").is_null());
    CHECK(out.at("violations").at("missing_paper_count") == 4);
    CHECK(result.err.find("no fenced schedule block") != std::string::npos);
    // --output mirrors the JSON report to a file.
    const json mirrored = json::parse(testutil::read_file(dir / "report.json"));
    CHECK(mirrored == out);
  }
}

TEST_CASE("ingest-check summarizes the inputs and validates the reference") {
  const fs::path dir = standard_dir("cli-ingest");
  const Instance instance = cli_instance();
  testutil::write_file(dir / "reference.txt", emit_schedule(instance, paired_schedule()).text);

  const auto result = run_cli({"--json", "ingest-check", "--papers", "papers.csv",
                               "--sessions", "sessions.csv", "--labeling", "labels.csv",
                               "--reference", "reference.txt"},
                              dir);
  REQUIRE(result.exit_code == 0);
  const json out = json::parse(result.out);
  CHECK(out.at("papers").at("count") == 4);
  CHECK(out.at("papers").at("total_duration") == 20);
  CHECK(out.at("papers").at("qa_titled") == 0);
  CHECK(out.at("sessions").at("count") == 2);
  CHECK(out.at("sessions").at("total_capacity") == 20);
  CHECK(out.at("sessions").at("capacity_covers_duration") == true);
  CHECK(out.at("labeling").at("count") == 4);
  CHECK(out.at("labeling").at("unlabeled_papers").empty());
  CHECK(out.at("reference").at("assigned_papers") == 4);
  CHECK(out.at("reference").at("feasibility").at("ok") == true);

  const auto no_sessions =
      run_cli({"ingest-check", "--papers", "papers.csv", "--reference", "reference.txt"}, dir);
  CHECK(no_sessions.exit_code == 2);
  CHECK(no_sessions.err.find("--reference needs --sessions") != std::string::npos);

  testutil::write_file(dir / "broken.csv", "id,title\noops\n");
  const auto broken = run_cli({"ingest-check", "--papers", "broken.csv"}, dir);
  CHECK(broken.exit_code == 2);
}
