#include "confsched/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace confsched {

namespace {

// Dense contingency table between two labelings over the same key set.
struct Contingency {
  std::vector<std::vector<std::size_t>> counts;  // [class][cluster]
  std::vector<std::size_t> class_totals;
  std::vector<std::size_t> cluster_totals;
  std::size_t n = 0;
};

Contingency build_contingency(const Labeling& reference, const Labeling& predicted) {
  if (reference.label.size() != predicted.label.size()) {
    throw Error("labelings cover different paper sets");
  }
  if (reference.label.empty()) throw Error("labelings must be non-empty");

  std::map<int, std::size_t> class_ids, cluster_ids;
  for (const auto& [paper, label] : reference.label) {
    class_ids.emplace(label, class_ids.size());
  }
  for (const auto& [paper, label] : predicted.label) {
    cluster_ids.emplace(label, cluster_ids.size());
  }

  Contingency table;
  table.counts.assign(class_ids.size(), std::vector<std::size_t>(cluster_ids.size(), 0));
  table.class_totals.assign(class_ids.size(), 0);
  table.cluster_totals.assign(cluster_ids.size(), 0);
  for (const auto& [paper, ref_label] : reference.label) {
    auto it = predicted.label.find(paper);
    if (it == predicted.label.end()) {
      throw Error("labelings cover different paper sets: '" + paper + "'");
    }
    std::size_t c = class_ids.at(ref_label);
    std::size_t k = cluster_ids.at(it->second);
    ++table.counts[c][k];
    ++table.class_totals[c];
    ++table.cluster_totals[k];
    ++table.n;
  }
  return table;
}

double entropy(const std::vector<std::size_t>& totals, std::size_t n) {
  double h = 0.0;
  for (std::size_t count : totals) {
    if (count == 0) continue;
    double p = static_cast<double>(count) / static_cast<double>(n);
    h -= p * std::log(p);
  }
  return h;
}

// H(rows | columns): sum over cells of -(n_ck/N) * ln(n_ck / n_k).
double conditional_entropy(const Contingency& t, bool rows_given_columns) {
  double h = 0.0;
  for (std::size_t c = 0; c < t.counts.size(); ++c) {
    for (std::size_t k = 0; k < t.counts[c].size(); ++k) {
      std::size_t joint = t.counts[c][k];
      if (joint == 0) continue;
      std::size_t given = rows_given_columns ? t.cluster_totals[k] : t.class_totals[c];
      double p_joint = static_cast<double>(joint) / static_cast<double>(t.n);
      h -= p_joint * std::log(static_cast<double>(joint) / static_cast<double>(given));
    }
  }
  return h;
}

}  // namespace

ScorePair homogeneity_completeness(const Labeling& reference, const Labeling& predicted) {
  Contingency table = build_contingency(reference, predicted);

  double h_class = entropy(table.class_totals, table.n);
  double h_cluster = entropy(table.cluster_totals, table.n);
  double h_class_given_cluster = conditional_entropy(table, /*rows_given_columns=*/true);
  double h_cluster_given_class = conditional_entropy(table, /*rows_given_columns=*/false);

  ScorePair scores;
  scores.homogeneity = h_class == 0.0 ? 1.0 : 1.0 - h_class_given_cluster / h_class;
  scores.completeness = h_cluster == 0.0 ? 1.0 : 1.0 - h_cluster_given_class / h_cluster;
  return scores;
}

ScorePair schedule_scores(const Schedule& reference, const Schedule& predicted,
                          const Instance& instance) {
  Labeling ref_labels, pred_labels;
  for (const Paper& paper : instance.papers()) {
    auto r = reference.assignment.find(paper.id);
    auto p = predicted.assignment.find(paper.id);
    if (r == reference.assignment.end() || p == predicted.assignment.end()) continue;
    auto ri = instance.session_index(r->second);
    auto pi = instance.session_index(p->second);
    if (!ri) throw Error("reference schedule references unknown session '" + r->second + "'");
    if (!pi) throw Error("predicted schedule references unknown session '" + p->second + "'");
    ref_labels.label[paper.id] = static_cast<int>(*ri);
    pred_labels.label[paper.id] = static_cast<int>(*pi);
  }
  if (ref_labels.label.empty()) {
    throw Error("schedules cover no common paper; scores undefined");
  }
  return homogeneity_completeness(ref_labels, pred_labels);
}

ViolationReport violation_report(const Instance& instance,
                                 const std::vector<RawScheduleRow>& rows,
                                 const Resolution& resolved) {
  ViolationReport report;

  report.missing_papers = resolved.report.unmatched_papers;

  std::set<std::string> seen_added;
  for (const RawScheduleRow& row : rows) {
    if (instance.session_index(row.session)) continue;
    if (seen_added.insert(row.session).second) {
      report.added_sessions.push_back(row.session);
    }
  }

  std::set<std::string> seen_duplicates;
  for (const auto& [row, paper_id] : resolved.report.duplicate_matches) {
    if (seen_duplicates.insert(paper_id).second) {
      report.duplicate_assignments.push_back(paper_id);
    }
  }

  // Overage against ground-truth durations of the resolved assignment.
  std::vector<int> load(instance.session_count(), 0);
  for (const auto& [paper_id, session_id] : resolved.schedule.assignment) {
    auto pi = instance.paper_index(paper_id);
    auto si = instance.session_index(session_id);
    if (!pi || !si) continue;
    load[*si] += instance.papers()[*pi].duration;
  }
  for (std::size_t j = 0; j < instance.session_count(); ++j) {
    const Session& session = instance.sessions()[j];
    int overage = load[j] - session.length;
    if (overage <= 0) continue;
    double fraction = static_cast<double>(overage) / static_cast<double>(session.length);
    report.overfull_sessions.push_back({session.id, fraction});
    if (fraction > 0.10) ++report.sessions_over_10pct;
    if (fraction > 0.50) ++report.sessions_over_50pct;
  }

  // Q/A placement: within each known session's rows (in row order), every
  // Q/A item must sit in the final position.
  std::map<std::string, std::vector<std::size_t>> session_rows;
  std::vector<std::string> session_order;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!instance.session_index(rows[i].session)) continue;
    auto [it, inserted] = session_rows.try_emplace(rows[i].session);
    if (inserted) session_order.push_back(rows[i].session);
    it->second.push_back(i);
  }
  auto row_is_qa = [&](std::size_t i) {
    auto paper = resolved.report.row_paper[i];
    if (paper) return is_qa_title(instance.papers()[*paper].title);
    return is_qa_title(rows[i].talk_title);
  };
  for (const std::string& session_id : session_order) {
    const auto& indices = session_rows.at(session_id);
    for (std::size_t pos = 0; pos + 1 < indices.size(); ++pos) {
      if (row_is_qa(indices[pos])) {
        report.qa_misplaced.push_back(session_id);
        break;
      }
    }
  }

  return report;
}

}  // namespace confsched
