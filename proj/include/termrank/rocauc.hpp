#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "termrank/label.hpp"

namespace termrank {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Wilcoxon rank-sum form of the AUC: mid-ranks for tied scores, so a tied
// (positive, negative) pair counts one half. Throws SingleClass when a
// class is missing and DimensionMismatch on unequal lengths.
double auc(std::span<const double> scores, std::span<const Label> labels);

// One point per distinct score, thresholds swept from high to low; tied
// scores move both rates in a single diagonal step.
RocCurve roc_points(std::span<const double> scores,
                    std::span<const Label> labels);

double trapezoid_area(std::span<const RocPoint> points) noexcept;

inline constexpr std::size_t kRocGridSize = 101;

// Vertical averaging: TPR interpolated on an evenly spaced FPR grid.
RocCurve average_curves(std::span<const RocCurve> curves);

// Repeated AUC evaluation over a fixed label vector without reallocating.
// Counts pairwise wins between the sorted positive and negative scores,
// an independent route to the same value as auc().
class AucEvaluator {
 public:
  explicit AucEvaluator(std::span<const Label> labels);

  double operator()(std::span<const double> scores);

  std::size_t positives() const noexcept { return pos_index_.size(); }
  std::size_t negatives() const noexcept { return neg_index_.size(); }

  // Same statistic from scores already split by class. Sorts both spans in
  // place; both must be non-empty.
  static double split_auc(std::span<double> pos, std::span<double> neg);

 private:
  std::vector<std::size_t> pos_index_;
  std::vector<std::size_t> neg_index_;
  std::vector<double> pos_;
  std::vector<double> neg_;
};

}  // namespace termrank
