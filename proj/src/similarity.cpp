#include "confsched/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "confsched/rng.hpp"

namespace confsched {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TfidfModel build_tfidf(const std::vector<Paper>& papers, TextFields fields) {
  if (papers.empty()) throw Error("build_tfidf needs at least one paper");

  auto document_text = [&](const Paper& p) {
    if (fields == TextFields::kTitleOnly || !p.abstract) return p.title;
    return p.title + " " + *p.abstract;
  };

  std::vector<std::vector<std::string>> doc_tokens(papers.size());
  std::map<std::string, std::size_t> document_frequency;
  for (std::size_t d = 0; d < papers.size(); ++d) {
    doc_tokens[d] = tokenize(document_text(papers[d]));
    std::map<std::string, bool> seen;
    for (const std::string& t : doc_tokens[d]) {
      if (!seen.emplace(t, true).second) continue;
      ++document_frequency[t];
    }
  }

  TfidfModel model;
  for (const auto& [token, df] : document_frequency) {
    model.vocabulary.emplace(token, model.vocabulary.size());
  }
  model.idf.resize(model.vocabulary.size());
  double n = static_cast<double>(papers.size());
  for (const auto& [token, column] : model.vocabulary) {
    double df = static_cast<double>(document_frequency.at(token));
    model.idf[column] = std::log((1.0 + n) / (1.0 + df)) + 1.0;
  }

  model.documents.resize(papers.size());
  model.paper_ids.resize(papers.size());
  for (std::size_t d = 0; d < papers.size(); ++d) {
    model.paper_ids[d] = papers[d].id;
    std::map<std::size_t, double> weights;  // column -> tf*idf
    for (const std::string& t : doc_tokens[d]) {
      std::size_t column = model.vocabulary.at(t);
      weights[column] += model.idf[column];
    }
    double norm_sq = 0.0;
    for (const auto& [column, w] : weights) norm_sq += w * w;
    double norm = std::sqrt(norm_sq);
    for (const auto& [column, w] : weights) {
      model.documents[d].push_back({column, w / norm});
    }
    if (!model.documents[d].empty()) ++model.non_zero_documents;
  }
  return model;
}

double cosine(const TfidfModel& model, std::size_t i, std::size_t j) {
  if (i >= model.documents.size() || j >= model.documents.size()) {
    throw Error("document index out of range");
  }
  const auto& a = model.documents[i];
  const auto& b = model.documents[j];
  double dot = 0.0;
  std::size_t x = 0, y = 0;
  while (x < a.size() && y < b.size()) {
    if (a[x].column == b[y].column) {
      dot += a[x].weight * b[y].weight;
      ++x;
      ++y;
    } else if (a[x].column < b[y].column) {
      ++x;
    } else {
      ++y;
    }
  }
  return dot;
}

namespace {

double distance_sq(const std::vector<TfidfModel::Entry>& point,
                   const std::vector<double>& centroid, double centroid_norm_sq) {
  // ||x - c||^2 = ||x||^2 + ||c||^2 - 2 x.c ; ||x||^2 is 1 (or 0 when empty).
  double point_norm_sq = point.empty() ? 0.0 : 1.0;
  double dot = 0.0;
  for (const auto& entry : point) dot += entry.weight * centroid[entry.column];
  double d = point_norm_sq + centroid_norm_sq - 2.0 * dot;
  return d > 0.0 ? d : 0.0;
}

}  // namespace

Labeling kmeans(const TfidfModel& model, int k, std::uint64_t seed) {
  const std::size_t n = model.documents.size();
  if (k < 1 || static_cast<std::size_t>(k) > model.non_zero_documents) {
    throw Error("k must be between 1 and the number of non-empty documents (" +
                std::to_string(model.non_zero_documents) + ")");
  }
  const std::size_t clusters = static_cast<std::size_t>(k);
  const std::size_t dims = model.idf.size();
  SeededRng rng(seed);

  std::vector<std::vector<double>> centroids(clusters, std::vector<double>(dims, 0.0));
  std::vector<double> centroid_norm_sq(clusters, 0.0);

  auto set_centroid_to_point = [&](std::size_t c, std::size_t point) {
    std::fill(centroids[c].begin(), centroids[c].end(), 0.0);
    for (const auto& entry : model.documents[point]) {
      centroids[c][entry.column] = entry.weight;
    }
    centroid_norm_sq[c] = model.documents[point].empty() ? 0.0 : 1.0;
  };

  // k-means++ seeding: first centroid uniform, the rest proportional to the
  // squared distance to the nearest chosen centroid.
  std::vector<double> best_d2(n, 0.0);
  set_centroid_to_point(0, rng.next_index(n));
  for (std::size_t i = 0; i < n; ++i) {
    best_d2[i] = distance_sq(model.documents[i], centroids[0], centroid_norm_sq[0]);
  }
  for (std::size_t c = 1; c < clusters; ++c) {
    double total = 0.0;
    for (double d : best_d2) total += d;
    std::size_t chosen;
    if (total <= 0.0) {
      chosen = rng.next_index(n);  // all mass on existing centroids
    } else {
      double r = rng.next_double() * total;
      double acc = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += best_d2[i];
        if (r < acc) {
          chosen = i;
          break;
        }
      }
    }
    set_centroid_to_point(c, chosen);
    for (std::size_t i = 0; i < n; ++i) {
      double d = distance_sq(model.documents[i], centroids[c], centroid_norm_sq[c]);
      if (d < best_d2[i]) best_d2[i] = d;
    }
  }

  std::vector<std::size_t> assignment(n, 0);
  constexpr int kMaxIterations = 300;
  for (int iteration = 0; iteration < kMaxIterations; ++iteration) {
    // Assignment step; ties go to the lowest cluster index.
    bool changed = iteration == 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_distance = distance_sq(model.documents[i], centroids[0], centroid_norm_sq[0]);
      for (std::size_t c = 1; c < clusters; ++c) {
        double d = distance_sq(model.documents[i], centroids[c], centroid_norm_sq[c]);
        if (d < best_distance) {
          best_distance = d;
          best = c;
        }
      }
      if (assignment[i] != best) {
        assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;

    // Update step.
    std::vector<std::size_t> counts(clusters, 0);
    for (auto& centroid : centroids) std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assignment[i]];
      for (const auto& entry : model.documents[i]) {
        centroids[assignment[i]][entry.column] += entry.weight;
      }
    }
    for (std::size_t c = 0; c < clusters; ++c) {
      if (counts[c] == 0) continue;
      for (double& v : centroids[c]) v /= static_cast<double>(counts[c]);
    }

    // Refill empty clusters with the point farthest from its centroid.
    for (std::size_t c = 0; c < clusters; ++c) {
      if (counts[c] != 0) continue;
      std::size_t farthest = 0;
      double farthest_distance = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[assignment[i]] <= 1) continue;  // keep clusters non-empty
        double ns = 0.0;
        for (double v : centroids[assignment[i]]) ns += v * v;
        double d = distance_sq(model.documents[i], centroids[assignment[i]], ns);
        if (d > farthest_distance) {
          farthest_distance = d;
          farthest = i;
        }
      }
      --counts[assignment[farthest]];
      assignment[farthest] = c;
      counts[c] = 1;
      set_centroid_to_point(c, farthest);
    }

    for (std::size_t c = 0; c < clusters; ++c) {
      double ns = 0.0;
      for (double v : centroids[c]) ns += v * v;
      centroid_norm_sq[c] = ns;
    }
  }

  Labeling labeling;
  for (std::size_t i = 0; i < n; ++i) {
    labeling.label[model.paper_ids[i]] = static_cast<int>(assignment[i]);
  }
  return labeling;
}

SimilarityMatrix labeling_to_similarity(const Labeling& labeling, const Instance& instance) {
  SimilarityMatrix sim(instance.paper_count());
  std::vector<int> labels(instance.paper_count());
  for (std::size_t i = 0; i < instance.paper_count(); ++i) {
    auto it = labeling.label.find(instance.papers()[i].id);
    if (it == labeling.label.end()) {
      throw Error("labeling is missing paper '" + instance.papers()[i].id + "'");
    }
    labels[i] = it->second;
  }
  for (std::size_t i = 0; i < instance.paper_count(); ++i) {
    for (std::size_t j = i + 1; j < instance.paper_count(); ++j) {
      if (labels[i] == labels[j]) sim.set(i, j, 1.0);
    }
  }
  return sim;
}

TrialsResult run_trials(const std::vector<Paper>& papers, TextFields fields, int k,
                        const std::vector<std::uint64_t>& seeds,
                        const std::optional<Labeling>& reference) {
  TfidfModel model = build_tfidf(papers, fields);

  std::optional<Labeling> restricted;
  if (reference) {
    restricted.emplace();
    for (const Paper& p : papers) {
      auto it = reference->label.find(p.id);
      if (it == reference->label.end()) {
        throw Error("reference labeling is missing paper '" + p.id + "'");
      }
      restricted->label[p.id] = it->second;
    }
  }

  TrialsResult result;
  for (std::uint64_t seed : seeds) {
    Labeling labeling = kmeans(model, k, seed);
    if (restricted) {
      result.per_trial.push_back(homogeneity_completeness(*restricted, labeling));
    }
    result.labelings.push_back(std::move(labeling));
  }
  if (!result.per_trial.empty()) {
    ScorePair mean;
    for (const ScorePair& s : result.per_trial) {
      mean.homogeneity += s.homogeneity;
      mean.completeness += s.completeness;
    }
    mean.homogeneity /= static_cast<double>(result.per_trial.size());
    mean.completeness /= static_cast<double>(result.per_trial.size());
    result.mean = mean;
  }
  return result;
}

}  // namespace confsched
