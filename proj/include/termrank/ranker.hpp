#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "termrank/feature_matrix.hpp"

namespace termrank {

enum class HypothesisKind { linear, weighted_l1 };

std::string_view kind_name(HypothesisKind kind) noexcept;
// Accepts "linear", "weighted_l1" and the short form "l1".
std::optional<HypothesisKind> parse_kind(std::string_view s) noexcept;

// A ranking function over d features. Linear hypotheses score <w, x>;
// weighted-L1 hypotheses score sum_i w_i |x_i - c_i|. `sigma` holds the
// evolution step sizes and plays no part in scoring.
struct Hypothesis {
  HypothesisKind kind = HypothesisKind::weighted_l1;
  std::vector<double> w;
  std::vector<double> c;  // empty for linear
  std::vector<double> sigma;

  std::size_t dimension() const noexcept { return w.size(); }

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

// Throws DimensionMismatch.
double score(const Hypothesis& h, std::span<const double> x);

// No bounds check; the hot path of fitness evaluation.
inline double score_unchecked(const Hypothesis& h,
                              std::span<const double> x) noexcept {
  double s = 0.0;
  const std::size_t d = h.w.size();
  if (h.kind == HypothesisKind::linear) {
    for (std::size_t i = 0; i < d; ++i) s += h.w[i] * x[i];
  } else {
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = x[i] - h.c[i];
      s += h.w[i] * (diff < 0 ? -diff : diff);
    }
  }
  return s;
}

// Min-max of one hypothesis's scores on its training split.
struct ScoreNormalizer {
  double lo = 0.0;
  double hi = 0.0;

  // Maps into [0,1], clamped; a collapsed range maps to 0.5.
  double apply(double raw) const noexcept;

  friend bool operator==(const ScoreNormalizer&,
                         const ScoreNormalizer&) = default;
};

ScoreNormalizer fit_normalizer(const Hypothesis& h,
                               std::span<const std::vector<double>> training);
ScoreNormalizer fit_normalizer(const Hypothesis& h, const LabeledData& training);

struct EnsembleMember {
  Hypothesis hypothesis;
  ScoreNormalizer normalizer;

  friend bool operator==(const EnsembleMember&,
                         const EnsembleMember&) = default;
};

// Median of T normalized member scores. Also carries the feature
// normalization fitted on the training split so raw rows can be scored.
struct EnsembleModel {
  std::vector<EnsembleMember> members;
  FeatureNormalizer features;
  std::vector<std::string> columns;

  std::size_t dimension() const noexcept {
    return members.empty() ? 0 : members.front().hypothesis.dimension();
  }

  friend bool operator==(const EnsembleModel&, const EnsembleModel&) = default;
};

// Member score after its normalizer, in [0,1].
double member_score(const EnsembleMember& m, std::span<const double> x);

// `x` is a normalized feature vector. Even T takes the mean of the two
// middle values.
double ensemble_score(const EnsembleModel& model, std::span<const double> x);

// Ensemble scores for every candidate's (already normalized) features.
std::vector<double> ensemble_scores(const EnsembleModel& model,
                                    const FeatureMatrix& data);

// Throws EmptyInput.
double median(std::vector<double> values);

}  // namespace termrank
