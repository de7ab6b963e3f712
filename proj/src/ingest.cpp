#include "confsched/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "confsched/csv.hpp"

namespace confsched {

namespace {

int parse_int_field(const std::string& text, const char* what, std::size_t row_number) {
  int value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw IngestError("row " + std::to_string(row_number) + ": " + what + " '" + text +
                      "' is not an integer");
  }
  return value;
}

void require_header(const csv::Row& header, const std::vector<std::string>& expected,
                    const std::string& path) {
  if (header != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) want += ',';
      want += expected[i];
    }
    throw IngestError("'" + path + "': expected header '" + want + "'");
  }
}

std::vector<std::string> split_on(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == delim) {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::vector<Paper> load_papers(const std::string& path) {
  auto rows = csv::read_file(path);
  if (rows.empty()) throw IngestError("'" + path + "': empty file, expected a header row");
  require_header(rows[0], {"id", "title", "abstract", "duration"}, path);

  std::vector<Paper> papers;
  std::map<std::string, std::size_t> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    if (row.size() != 4) {
      throw IngestError("row " + std::to_string(r + 1) + ": expected 4 fields, got " +
                        std::to_string(row.size()));
    }
    Paper p;
    p.id = row[0];
    p.title = row[1];
    if (!row[2].empty()) p.abstract = row[2];
    p.duration = parse_int_field(row[3], "duration", r + 1);
    if (p.duration <= 0) {
      throw IngestError("row " + std::to_string(r + 1) + ": duration must be positive");
    }
    if (p.id.empty()) throw IngestError("row " + std::to_string(r + 1) + ": empty id");
    if (p.title.empty()) throw IngestError("row " + std::to_string(r + 1) + ": empty title");
    auto [it, inserted] = seen.emplace(p.id, r + 1);
    if (!inserted) {
      throw IngestError("row " + std::to_string(r + 1) + ": duplicate paper id '" + p.id + "'");
    }
    papers.push_back(std::move(p));
  }
  return papers;
}

std::vector<Session> load_sessions(const std::string& path) {
  auto rows = csv::read_file(path);
  if (rows.empty()) throw IngestError("'" + path + "': empty file, expected a header row");
  require_header(rows[0], {"id", "title", "length"}, path);

  std::vector<Session> sessions;
  std::map<std::string, std::size_t> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    if (row.size() != 3) {
      throw IngestError("row " + std::to_string(r + 1) + ": expected 3 fields, got " +
                        std::to_string(row.size()));
    }
    Session s;
    s.id = row[0];
    s.title = row[1];
    s.length = parse_int_field(row[2], "length", r + 1);
    if (s.length <= 0) {
      throw IngestError("row " + std::to_string(r + 1) + ": length must be positive");
    }
    if (s.id.empty()) throw IngestError("row " + std::to_string(r + 1) + ": empty id");
    auto [it, inserted] = seen.emplace(s.id, r + 1);
    if (!inserted) {
      throw IngestError("row " + std::to_string(r + 1) + ": duplicate session id '" + s.id + "'");
    }
    sessions.push_back(std::move(s));
  }
  return sessions;
}

Labeling load_labeling(const std::string& path) {
  auto rows = csv::read_file(path);
  if (rows.empty()) throw IngestError("'" + path + "': empty file, expected a header row");
  require_header(rows[0], {"paper_id", "cluster"}, path);

  Labeling labeling;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    if (row.size() != 2) {
      throw IngestError("row " + std::to_string(r + 1) + ": expected 2 fields, got " +
                        std::to_string(row.size()));
    }
    int cluster = parse_int_field(row[1], "cluster", r + 1);
    if (cluster < 0) {
      throw IngestError("row " + std::to_string(r + 1) + ": cluster must be >= 0");
    }
    if (!labeling.label.emplace(row[0], cluster).second) {
      throw IngestError("row " + std::to_string(r + 1) + ": duplicate paper id '" + row[0] + "'");
    }
  }
  return labeling;
}

void save_labeling(const std::string& path, const Labeling& labeling) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write '" + path + "'");
  out << "paper_id,cluster\n";
  for (const auto& [paper_id, cluster] : labeling.label) {
    out << csv::format_row({paper_id, std::to_string(cluster)});
  }
}

std::optional<std::string> extract_fenced_block(const std::string& text) {
  const std::string fence = "```";
  std::size_t open = text.find(fence);
  if (open == std::string::npos) return std::nullopt;
  std::size_t content = text.find('\n', open + fence.size());
  if (content == std::string::npos) return std::nullopt;
  ++content;
  std::size_t close = text.find(fence, content);
  if (close == std::string::npos) return std::nullopt;
  return text.substr(content, close - content);
}

ParsedScheduleBlock parse_schedule_block(const std::string& text) {
  ParsedScheduleBlock result;
  auto block = extract_fenced_block(text);
  if (!block) {
    result.defects.push_back({0, "", "no complete ``` fenced block found"});
    return result;
  }
  result.fence_found = true;

  std::istringstream lines(*block);
  std::string line;
  std::size_t line_number = 0;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (trim(line) == kScheduleHeader) continue;
      result.defects.push_back({line_number, line, "missing header line"});
      // fall through: treat as data
    }
    auto fields = split_on(line, '@');
    if (fields.size() != 3) {
      result.defects.push_back({line_number, line,
                                "expected 3 @-separated fields, got " +
                                    std::to_string(fields.size())});
      continue;
    }
    RawScheduleRow row;
    row.session = trim(fields[0]);
    row.talk_title = trim(fields[1]);
    std::string duration_text = trim(fields[2]);
    int duration = 0;
    auto [ptr, ec] = std::from_chars(duration_text.data(),
                                     duration_text.data() + duration_text.size(), duration);
    if (ec != std::errc{} || ptr != duration_text.data() + duration_text.size() ||
        duration_text.empty() || duration < 0) {
      result.defects.push_back({line_number, line, "duration is not a non-negative integer"});
      continue;
    }
    row.duration = duration;
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string normalize_title(const std::string& title) {
  std::string out;
  out.reserve(title.size());
  bool pending_space = false;
  for (unsigned char c : title) {
    if (std::isalnum(c)) {
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out += static_cast<char>(std::tolower(c));
    } else {
      pending_space = true;  // punctuation and whitespace both separate
    }
  }
  return out;
}

double title_similarity(const std::string& a, const std::string& b) {
  std::string na = normalize_title(a);
  std::string nb = normalize_title(b);
  if (na.empty() || nb.empty()) return 0.0;
  std::size_t limit = std::min(na.size(), nb.size());
  std::size_t lcp = 0;
  while (lcp < limit && na[lcp] == nb[lcp]) ++lcp;
  return static_cast<double>(lcp) / static_cast<double>(limit);
}

bool is_qa_title(const std::string& title) {
  return normalize_title(title) == normalize_title(kQaTitle);
}

TitleMatchResult match_titles(const std::vector<std::string>& titles,
                              const std::vector<Paper>& papers) {
  TitleMatchResult result;
  result.match.assign(titles.size(), std::nullopt);

  std::vector<std::string> norm_titles(titles.size());
  for (std::size_t i = 0; i < titles.size(); ++i) norm_titles[i] = normalize_title(titles[i]);
  std::vector<std::string> norm_papers(papers.size());
  for (std::size_t j = 0; j < papers.size(); ++j) norm_papers[j] = normalize_title(papers[j].title);

  struct Candidate {
    double score;
    std::size_t input;
    std::size_t paper;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < titles.size(); ++i) {
    for (std::size_t j = 0; j < papers.size(); ++j) {
      const std::string& na = norm_titles[i];
      const std::string& nb = norm_papers[j];
      if (na.empty() || nb.empty()) continue;
      std::size_t limit = std::min(na.size(), nb.size());
      std::size_t lcp = 0;
      while (lcp < limit && na[lcp] == nb[lcp]) ++lcp;
      double score = static_cast<double>(lcp) / static_cast<double>(limit);
      if (score >= kTitleMatchThreshold) candidates.push_back({score, i, j});
    }
  }

  // Edit distances only matter for score ties; compute them lazily.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edit_cache;
  auto edit = [&](std::size_t i, std::size_t j) {
    auto key = std::make_pair(i, j);
    auto it = edit_cache.find(key);
    if (it != edit_cache.end()) return it->second;
    std::size_t d = edit_distance(norm_titles[i], norm_papers[j]);
    edit_cache.emplace(key, d);
    return d;
  };
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    std::size_t ea = edit(a.input, a.paper);
    std::size_t eb = edit(b.input, b.paper);
    if (ea != eb) return ea < eb;
    if (a.input != b.input) return a.input < b.input;
    return a.paper < b.paper;
  });

  std::vector<bool> paper_taken(papers.size(), false);
  std::vector<bool> input_done(titles.size(), false);
  for (const Candidate& c : candidates) {
    if (input_done[c.input] || paper_taken[c.paper]) continue;
    result.match[c.input] = c.paper;
    input_done[c.input] = true;
    paper_taken[c.paper] = true;
  }

  for (std::size_t i = 0; i < titles.size(); ++i) {
    if (input_done[i]) continue;
    // Best candidate for this input, if any; it must have been taken.
    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (const Candidate& c : candidates) {
      if (c.input != i) continue;
      bool better = !best || c.score > best_score ||
                    (c.score == best_score && edit(i, c.paper) < edit(i, *best));
      if (better) {
        best = c.paper;
        best_score = c.score;
      }
    }
    if (best) {
      result.duplicate_matches.emplace_back(i, *best);
    } else {
      result.unmatched_inputs.push_back(i);
    }
  }
  return result;
}

Resolution resolve_titles(const std::vector<RawScheduleRow>& rows, const Instance& instance) {
  Resolution resolution;
  std::vector<std::string> titles(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) titles[i] = rows[i].talk_title;

  TitleMatchResult matches = match_titles(titles, instance.papers());
  resolution.report.row_paper = matches.match;
  resolution.report.unmatched_rows = matches.unmatched_inputs;
  for (const auto& [row, paper] : matches.duplicate_matches) {
    resolution.report.duplicate_matches.emplace_back(row, instance.papers()[paper].id);
    resolution.report.unmatched_rows.push_back(row);
  }
  std::sort(resolution.report.unmatched_rows.begin(), resolution.report.unmatched_rows.end());

  std::vector<bool> paper_matched(instance.paper_count(), false);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto paper = matches.match[i];
    if (!paper) continue;
    paper_matched[*paper] = true;
    if (!instance.session_index(rows[i].session)) {
      resolution.report.unknown_session_rows.push_back(i);
      continue;
    }
    resolution.schedule.assignment[instance.papers()[*paper].id] = rows[i].session;
  }
  for (std::size_t j = 0; j < instance.paper_count(); ++j) {
    if (!paper_matched[j]) {
      resolution.report.unmatched_papers.push_back(instance.papers()[j].id);
    }
  }
  return resolution;
}

EmittedSchedule emit_schedule(const Instance& instance, const Schedule& schedule) {
  for (const Paper& p : instance.papers()) {
    if (!schedule.assignment.count(p.id)) {
      throw IngestError("cannot emit partial schedule: paper '" + p.id + "' unassigned");
    }
  }

  EmittedSchedule out;
  out.text = "```\n";
  out.text += kScheduleHeader;
  out.text += '\n';
  for (const Session& session : instance.sessions()) {
    for (const Paper& paper : instance.papers()) {
      auto it = schedule.assignment.find(paper.id);
      if (it->second != session.id) continue;
      std::string title = paper.title;
      if (title.find('@') != std::string::npos) {
        std::string sanitized;
        for (char c : title) {
          if (c == '@') sanitized += "(at)";
          else sanitized += c;
        }
        title = std::move(sanitized);
        out.sanitized_papers.push_back(paper.id);
      }
      out.text += session.id;
      out.text += '@';
      out.text += title;
      out.text += '@';
      out.text += std::to_string(paper.duration);
      out.text += '\n';
    }
  }
  out.text += "```\n";
  return out;
}

Schedule load_schedule_file(const std::string& path, const Instance& instance) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();

  ParsedScheduleBlock parsed = parse_schedule_block(buffer.str());
  if (!parsed.fence_found) {
    throw IngestError("'" + path + "': no ``` fenced schedule block found");
  }
  if (!parsed.defects.empty()) {
    throw IngestError("'" + path + "': line " + std::to_string(parsed.defects.front().line) +
                      ": " + parsed.defects.front().reason);
  }
  Resolution resolution = resolve_titles(parsed.rows, instance);
  if (!resolution.report.unmatched_rows.empty()) {
    std::size_t row = resolution.report.unmatched_rows.front();
    throw IngestError("'" + path + "': row '" + parsed.rows[row].talk_title +
                      "' does not match any paper");
  }
  if (!resolution.report.unknown_session_rows.empty()) {
    std::size_t row = resolution.report.unknown_session_rows.front();
    throw IngestError("'" + path + "': unknown session id '" + parsed.rows[row].session + "'");
  }
  return resolution.schedule;
}

void save_schedule_file(const std::string& path, const Instance& instance,
                        const Schedule& schedule) {
  EmittedSchedule emitted = emit_schedule(instance, schedule);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write '" + path + "'");
  out << emitted.text;
}

}  // namespace confsched
