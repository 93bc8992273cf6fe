#include "termrank/rocauc.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>

#include "termrank/error.hpp"

namespace termrank {

namespace {

// Order-preserving map from double to unsigned key (NaN excluded).
std::uint64_t sort_key(double v) noexcept {
  const auto u = std::bit_cast<std::uint64_t>(v);
  return (u >> 63) ? ~u : (u | (std::uint64_t{1} << 63));
}

double from_key(std::uint64_t k) noexcept {
  return std::bit_cast<double>((k >> 63) ? (k & ~(std::uint64_t{1} << 63)) : ~k);
}

// LSD radix sort, one byte per pass; passes where every key shares the
// byte are skipped. Avoids the branch mispredictions of comparison sorts
// on the ES hot path.
void radix_sort(std::span<double> values) {
  if (values.size() < 64) {
    std::sort(values.begin(), values.end());
    return;
  }
  thread_local std::vector<std::uint64_t> keys;
  thread_local std::vector<std::uint64_t> buffer;
  const std::size_t n = values.size();
  keys.resize(n);
  buffer.resize(n);
  std::array<std::array<std::size_t, 256>, 8> counts{};
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t k = sort_key(values[i]);
    keys[i] = k;
    for (int b = 0; b < 8; ++b) ++counts[b][(k >> (8 * b)) & 0xff];
  }
  for (int b = 0; b < 8; ++b) {
    auto& c = counts[b];
    if (c[(keys[0] >> (8 * b)) & 0xff] == n) continue;
    std::size_t offset = 0;
    for (auto& slot : c) {
      const std::size_t here = slot;
      slot = offset;
      offset += here;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t k = keys[i];
      buffer[c[(k >> (8 * b)) & 0xff]++] = k;
    }
    keys.swap(buffer);
  }
  for (std::size_t i = 0; i < n; ++i) values[i] = from_key(keys[i]);
}

struct ClassCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

ClassCounts check_inputs(std::span<const double> scores,
                         std::span<const Label> labels) {
  if (scores.size() != labels.size()) {
    throw DimensionMismatch(std::to_string(scores.size()) + " scores but " +
                            std::to_string(labels.size()) + " labels");
  }
  ClassCounts c;
  for (Label y : labels) (is_positive(y) ? c.pos : c.neg)++;
  if (c.pos == 0 || c.neg == 0) {
    throw SingleClass("AUC needs at least one positive and one negative");
  }
  return c;
}

std::vector<std::size_t> order_by_score(std::span<const double> scores,
                                        bool descending) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (descending) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return scores[a] > scores[b];
    });
  } else {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return scores[a] < scores[b];
    });
  }
  return idx;
}

double interpolate_tpr(std::span<const RocPoint> pts, double fpr) noexcept {
  // Last point at or left of `fpr`; on a vertical run this is the top.
  auto it = std::upper_bound(
      pts.begin(), pts.end(), fpr,
      [](double f, const RocPoint& p) { return f < p.fpr; });
  if (it == pts.begin()) return pts.front().tpr;
  const RocPoint& left = *(it - 1);
  if (it == pts.end() || left.fpr == fpr) return left.tpr;
  const RocPoint& right = *it;
  const double t = (fpr - left.fpr) / (right.fpr - left.fpr);
  return left.tpr + t * (right.tpr - left.tpr);
}

}  // namespace

double auc(std::span<const double> scores, std::span<const Label> labels) {
  const auto counts = check_inputs(scores, labels);
  const auto idx = order_by_score(scores, false);

  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      if (is_positive(labels[idx[j]])) ++pos_in_group;
      ++j;
    }
    // Ranks are 1-based; the group occupies ranks i+1..j.
    const double mid_rank = (static_cast<double>(i + 1 + j)) / 2.0;
    rank_sum += mid_rank * static_cast<double>(pos_in_group);
    i = j;
  }
  const double np = static_cast<double>(counts.pos);
  const double nn = static_cast<double>(counts.neg);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

RocCurve roc_points(std::span<const double> scores,
                    std::span<const Label> labels) {
  const auto counts = check_inputs(scores, labels);
  const auto idx = order_by_score(scores, true);
  const double np = static_cast<double>(counts.pos);
  const double nn = static_cast<double>(counts.neg);

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      (is_positive(labels[idx[j]]) ? tp : fp)++;
      ++j;
    }
    curve.points.push_back(
        {static_cast<double>(fp) / nn, static_cast<double>(tp) / np});
    i = j;
  }
  curve.auc = trapezoid_area(curve.points);
  return curve;
}

double trapezoid_area(std::span<const RocPoint> points) noexcept {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) *
            (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return area;
}

RocCurve average_curves(std::span<const RocCurve> curves) {
  if (curves.empty()) throw EmptyInput("no ROC curves to average");
  RocCurve out;
  out.points.reserve(kRocGridSize + 1);
  const double step = 1.0 / static_cast<double>(kRocGridSize - 1);
  for (std::size_t g = 0; g < kRocGridSize; ++g) {
    const double fpr = g + 1 == kRocGridSize ? 1.0 : step * static_cast<double>(g);
    double sum = 0.0;
    for (const auto& c : curves) sum += interpolate_tpr(c.points, fpr);
    const double tpr = sum / static_cast<double>(curves.size());
    if (g == 0 && tpr > 0.0) out.points.push_back({0.0, 0.0});
    out.points.push_back({fpr, tpr});
  }
  out.auc = trapezoid_area(out.points);
  return out;
}

AucEvaluator::AucEvaluator(std::span<const Label> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (is_positive(labels[i]) ? pos_index_ : neg_index_).push_back(i);
  }
  if (pos_index_.empty() || neg_index_.empty()) {
    throw SingleClass("AUC needs at least one positive and one negative");
  }
  pos_.resize(pos_index_.size());
  neg_.resize(neg_index_.size());
}

double AucEvaluator::operator()(std::span<const double> scores) {
  for (std::size_t k = 0; k < pos_index_.size(); ++k) {
    pos_[k] = scores[pos_index_[k]];
  }
  for (std::size_t k = 0; k < neg_index_.size(); ++k) {
    neg_[k] = scores[neg_index_[k]];
  }
  return split_auc(pos_, neg_);
}

double AucEvaluator::split_auc(std::span<double> pos, std::span<double> neg) {
  radix_sort(pos);
  radix_sort(neg);

  // For each positive: negatives strictly below count 1, equal count 1/2.
  // Accumulate in half-units so the sum stays an exact integer.
  std::size_t below = 0;
  std::size_t not_above = 0;
  std::size_t half_wins = 0;
  for (double p : pos) {
    while (below < neg.size() && neg[below] < p) ++below;
    if (not_above < below) not_above = below;
    while (not_above < neg.size() && neg[not_above] <= p) ++not_above;
    half_wins += below + not_above;
  }
  return static_cast<double>(half_wins) / 2.0 /
         (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

}  // namespace termrank
