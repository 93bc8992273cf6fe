#include "termrank/ranker.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "termrank/error.hpp"

namespace termrank {

std::string_view kind_name(HypothesisKind kind) noexcept {
  return kind == HypothesisKind::linear ? "linear" : "weighted_l1";
}

std::optional<HypothesisKind> parse_kind(std::string_view s) noexcept {
  if (s == "linear") return HypothesisKind::linear;
  if (s == "weighted_l1" || s == "l1") return HypothesisKind::weighted_l1;
  return std::nullopt;
}

double score(const Hypothesis& h, std::span<const double> x) {
  if (x.size() != h.dimension()) {
    throw DimensionMismatch("hypothesis has dimension " +
                            std::to_string(h.dimension()) + ", input has " +
                            std::to_string(x.size()));
  }
  if (h.kind == HypothesisKind::weighted_l1 && h.c.size() != h.w.size()) {
    throw DimensionMismatch("weighted-L1 hypothesis needs one center per weight");
  }
  return score_unchecked(h, x);
}

double ScoreNormalizer::apply(double raw) const noexcept {
  if (!(hi > lo)) return 0.5;
  return std::clamp((raw - lo) / (hi - lo), 0.0, 1.0);
}

ScoreNormalizer fit_normalizer(const Hypothesis& h,
                               std::span<const std::vector<double>> training) {
  if (training.empty()) throw EmptyInput("no training vectors");
  ScoreNormalizer n{std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity()};
  for (const auto& x : training) {
    const double s = score(h, x);
    n.lo = std::min(n.lo, s);
    n.hi = std::max(n.hi, s);
  }
  return n;
}

ScoreNormalizer fit_normalizer(const Hypothesis& h,
                               const LabeledData& training) {
  if (training.size() == 0) throw EmptyInput("no training vectors");
  ScoreNormalizer n{std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < training.size(); ++i) {
    const double s = score(h, training.row(i));
    n.lo = std::min(n.lo, s);
    n.hi = std::max(n.hi, s);
  }
  return n;
}

double member_score(const EnsembleMember& m, std::span<const double> x) {
  return m.normalizer.apply(score(m.hypothesis, x));
}

double median(std::vector<double> values) {
  if (values.empty()) throw EmptyInput("median of nothing");
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return (lower + upper) / 2.0;
}

double ensemble_score(const EnsembleModel& model, std::span<const double> x) {
  if (model.members.empty()) throw EmptyInput("ensemble has no members");
  std::vector<double> scores;
  scores.reserve(model.members.size());
  for (const auto& m : model.members) scores.push_back(member_score(m, x));
  return median(std::move(scores));
}

std::vector<double> ensemble_scores(const EnsembleModel& model,
                                    const FeatureMatrix& data) {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& c : data.candidates()) {
    out.push_back(ensemble_score(model, c.features));
  }
  return out;
}

}  // namespace termrank
