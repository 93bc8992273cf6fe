#pragma once

// Test-only oracles and generators. Nothing here calls into the code paths
// it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "termrank/corpus.hpp"
#include "termrank/feature_matrix.hpp"
#include "termrank/label.hpp"
#include "termrank/measures.hpp"

namespace termrank::testing {

// O(n^2) pairwise statistic: wins + ties / 2 over all (pos, neg) pairs.
inline double brute_force_auc(std::span<const double> scores,
                              std::span<const Label> labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!is_positive(labels[i])) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (is_positive(labels[j])) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

struct ScoredSample {
  std::vector<double> scores;
  std::vector<Label> labels;
};

// Random labeled scores with both classes present. Scores are drawn from a
// small grid so ties are frequent.
inline ScoredSample random_scored_sample(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> grid(0, static_cast<int>(n / 3 + 1));
  std::bernoulli_distribution coin(0.5);
  ScoredSample s;
  for (std::size_t i = 0; i < n; ++i) {
    s.scores.push_back(grid(rng) * 0.25);
    s.labels.push_back(coin(rng) ? Label::positive : Label::negative);
  }
  s.labels[0] = Label::positive;
  s.labels[1] = Label::negative;
  return s;
}

inline std::vector<std::string> generic_columns(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
  return names;
}

// Features uniform on [0,1]; labels from `rule`.
template <typename Rule>
FeatureMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t d,
                            Rule&& rule) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Candidate> rows;
  for (std::size_t i = 0; i < n; ++i) {
    Candidate c;
    c.id = "c" + std::to_string(i);
    for (std::size_t j = 0; j < d; ++j) c.raw.push_back(u(rng));
    c.label = rule(c.raw) ? Label::positive : Label::negative;
    rows.push_back(std::move(c));
  }
  return FeatureMatrix::fit(generic_columns(d), std::move(rows),
                            NormalizationMode::minmax);
}

// Planted-signal data over the 13 measure columns: relevance is a
// weighted-L1 ball around (x3 = 0.4, x7 = 0.8), flipped with probability
// `noise`. The other columns mix x3 and x7 linearly with independent noise,
// so they correlate with the signal without being able to express it.
inline FeatureMatrix planted_signal(std::uint64_t seed, std::size_t n,
                                    double noise, bool randomize_labels = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> eps(0.0, 0.15);
  std::bernoulli_distribution flip(noise);
  std::bernoulli_distribution coin(0.5);
  // Median of 0.7|U-0.4| + 0.3|V-0.8| for U, V uniform, by simulation
  // (about 0.277); keeps the classes near balance.
  constexpr double kThreshold = 0.277;
  const auto columns = measure_columns();
  std::vector<Candidate> rows;
  for (std::size_t i = 0; i < n; ++i) {
    Candidate c;
    c.id = "cand" + std::to_string(i);
    c.raw.assign(kMeasureCount, 0.0);
    const double x3 = u(rng);
    const double x7 = u(rng);
    c.raw[3] = x3;
    c.raw[7] = x7;
    for (std::size_t j = 0; j < kMeasureCount; ++j) {
      if (j == 3 || j == 7) continue;
      const double a = static_cast<double>(j % 5) / 4.0;
      c.raw[j] = std::clamp(a * x3 + (1.0 - a) * x7 + eps(rng), 0.0, 1.0);
    }
    bool relevant = 0.7 * std::abs(x3 - 0.4) + 0.3 * std::abs(x7 - 0.8) <
                    kThreshold;
    if (flip(rng)) relevant = !relevant;
    if (randomize_labels) relevant = coin(rng);
    c.label = relevant ? Label::positive : Label::negative;
    rows.push_back(std::move(c));
  }
  return FeatureMatrix::fit(columns, std::move(rows), NormalizationMode::minmax);
}

// Random tagged sentences over a small vocabulary and a few tags, so that
// pattern instances and repeated pairs are common.
inline std::vector<Sentence> random_corpus(std::mt19937_64& rng) {
  static const char* const kTags[] = {"NOUN", "ADJ", "VERB", "DET"};
  std::uniform_int_distribution<int> sentences(1, 40);
  std::uniform_int_distribution<int> length(0, 15);
  std::uniform_int_distribution<int> word(0, 11);
  std::uniform_int_distribution<int> tag(0, 3);
  std::vector<Sentence> corpus(static_cast<std::size_t>(sentences(rng)));
  for (auto& s : corpus) {
    const int len = length(rng);
    for (int i = 0; i < len; ++i) {
      s.push_back({"w" + std::to_string(word(rng)), kTags[tag(rng)]});
    }
  }
  return corpus;
}

struct Recount {
  std::map<std::pair<std::string, std::string>, Count> n11;
  std::map<std::string, Count> first;
  std::map<std::string, Count> second;
  Count total = 0;
};

// Direct enumeration of adjacent (first, second) tag matches.
inline Recount brute_force_recount(const std::vector<Sentence>& corpus,
                                   const std::string& first_tag,
                                   const std::string& second_tag) {
  Recount r;
  for (const auto& s : corpus) {
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (s[i - 1].tag == first_tag && s[i].tag == second_tag) {
        r.n11[{s[i - 1].surface, s[i].surface}] += 1;
        r.first[s[i - 1].surface] += 1;
        r.second[s[i].surface] += 1;
        r.total += 1;
      }
    }
  }
  return r;
}

}  // namespace termrank::testing
