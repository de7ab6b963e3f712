#pragma once

// Text-similarity clustering: TFIDF vectorization of titles/abstracts,
// seeded k-means over the normalized vectors, and conversion of any
// labeling into the binary similarity matrix the solver consumes.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "confsched/core.hpp"
#include "confsched/metrics.hpp"

namespace confsched {

enum class TextFields { kTitleOnly, kTitleAndAbstract };

// Sparse TFIDF document vectors. Tokens are lowercase maximal alphanumeric
// runs; tf is the raw count; idf(t) = ln((1+N)/(1+df(t))) + 1; vectors are
// L2-normalized (the zero vector stays zero for empty text).
struct TfidfModel {
  struct Entry {
    std::size_t column = 0;
    double weight = 0.0;
  };

  std::map<std::string, std::size_t> vocabulary;  // token -> column
  std::vector<double> idf;                        // per column
  std::vector<std::vector<Entry>> documents;      // per paper, sorted by column
  std::vector<std::string> paper_ids;             // document order
  std::size_t non_zero_documents = 0;
};

std::vector<std::string> tokenize(const std::string& text);

TfidfModel build_tfidf(const std::vector<Paper>& papers, TextFields fields);

// Dot product of the normalized vectors; 0 if either document is empty.
double cosine(const TfidfModel& model, std::size_t i, std::size_t j);

// Seeded k-means++ with Lloyd iterations (squared Euclidean, max 300
// rounds, stop at assignment fixpoint). Empty clusters are refilled with
// the point farthest from its centroid. Deterministic for a fixed seed.
// Requires 1 <= k <= number of non-zero documents.
Labeling kmeans(const TfidfModel& model, int k, std::uint64_t seed);

// values[i][j] = 1 if the papers share a label and i != j, else 0.
SimilarityMatrix labeling_to_similarity(const Labeling& labeling, const Instance& instance);

struct TrialsResult {
  std::vector<Labeling> labelings;       // one per seed
  std::vector<ScorePair> per_trial;      // empty without a reference
  std::optional<ScorePair> mean;
};

// One k-means run per seed. With a reference labeling (which must cover
// every paper), also reports per-trial and mean homogeneity/completeness.
TrialsResult run_trials(const std::vector<Paper>& papers, TextFields fields, int k,
                        const std::vector<std::uint64_t>& seeds,
                        const std::optional<Labeling>& reference);

}  // namespace confsched
