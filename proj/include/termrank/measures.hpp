#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace termrank {

using Count = std::int64_t;

// 2x2 co-occurrence table of one candidate (first word x, second word y).
// Only constructible through contingency(), which checks the margins.
class ContingencyTable {
 public:
  Count n11() const noexcept { return n11_; }
  Count n_x() const noexcept { return n_x_; }
  Count n_y() const noexcept { return n_y_; }
  Count n_total() const noexcept { return n_total_; }

  Count n12() const noexcept { return n_x_ - n11_; }
  Count n21() const noexcept { return n_y_ - n11_; }
  Count n22() const noexcept { return n_total_ - n_x_ - n_y_ + n11_; }

  friend bool operator==(const ContingencyTable&,
                         const ContingencyTable&) = default;

 private:
  friend ContingencyTable contingency(Count, Count, Count, Count);
  ContingencyTable(Count n11, Count n_x, Count n_y, Count n_total)
      : n11_(n11), n_x_(n_x), n_y_(n_y), n_total_(n_total) {}

  Count n11_;
  Count n_x_;
  Count n_y_;
  Count n_total_;
};

// Throws MarginViolation when the counts cannot form a table.
ContingencyTable contingency(Count n11, Count n_x, Count n_y, Count n_total);

// Declared order is the feature-vector column order.
enum class MeasureId : std::uint8_t {
  MI,
  MI3,
  Dice,
  L,
  OccL,
  Ass,
  SeSc,
  J,
  Conv,
  LC,
  CM,
  Khi2,
  Ttest,
};

inline constexpr std::size_t kMeasureCount = 13;

inline constexpr std::array<MeasureId, kMeasureCount> kAllMeasures = {
    MeasureId::MI,   MeasureId::MI3,  MeasureId::Dice, MeasureId::L,
    MeasureId::OccL, MeasureId::Ass,  MeasureId::SeSc, MeasureId::J,
    MeasureId::Conv, MeasureId::LC,   MeasureId::CM,   MeasureId::Khi2,
    MeasureId::Ttest};

constexpr std::size_t index_of(MeasureId m) noexcept {
  return static_cast<std::size_t>(m);
}

std::string_view measure_name(MeasureId m) noexcept;

// Case-sensitive lookup by the names used in file headers ("MI", "OccL"...).
std::optional<MeasureId> find_measure(std::string_view name) noexcept;

// Like find_measure but throws UnknownMeasure.
MeasureId parse_measure(std::string_view name);

// Scalar value of one association measure. OccL is an ordering, not a
// formula, and throws UnsupportedMeasure; see occl_compare / occl_key.
double compute_measure(MeasureId m, const ContingencyTable& t);

enum class Ordering { a_first, b_first, equal };

struct OccLEntry {
  ContingencyTable table;
  double l_score;
};

// Higher occurrence count first, ties broken by higher log-likelihood.
Ordering occl_compare(const OccLEntry& a, const OccLEntry& b) noexcept;

// Scalar key whose numeric order reproduces occl_compare:
// n11 + L / (1 + L), with L clamped at 0.
double occl_key(Count n11, double l_score) noexcept;

// All 13 raw values in MeasureId order; the OccL slot holds occl_key.
std::array<double, kMeasureCount> raw_scores(const ContingencyTable& t);

}  // namespace termrank
