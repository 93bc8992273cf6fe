#include "termrank/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "termrank/error.hpp"

namespace termrank {

namespace {

constexpr std::array<std::string_view, kMeasureCount> kNames = {
    "MI", "MI3", "Dice", "L",  "OccL", "Ass",  "SeSc",
    "J",  "Conv", "LC",  "CM", "Khi2", "Ttest"};

// Zero counts in a denominator are replaced by one half.
double smoothed(Count c) noexcept {
  return c == 0 ? 0.5 : static_cast<double>(c);
}

// n * ln(n * N / (row * col)); empty cells contribute nothing.
double g2_term(Count n, Count row, Count col, Count total) noexcept {
  if (n == 0) return 0.0;
  const double nd = static_cast<double>(n);
  return nd * std::log(nd * static_cast<double>(total) /
                       (static_cast<double>(row) * static_cast<double>(col)));
}

// p * log2(p / q) with the 0 * log 0 = 0 convention.
double plogq(double p, double q) noexcept {
  if (p <= 0.0) return 0.0;
  return p * std::log2(p / q);
}

}  // namespace

ContingencyTable contingency(Count n11, Count n_x, Count n_y, Count n_total) {
  if (n11 < 0 || n_x < 0 || n_y < 0 || n_total < 0) {
    throw MarginViolation("contingency counts must be non-negative");
  }
  if (n11 < 1) {
    throw MarginViolation("joint count n11 must be at least 1");
  }
  if (n11 > n_x || n11 > n_y) {
    throw MarginViolation("joint count " + std::to_string(n11) +
                          " exceeds a marginal count (nx=" +
                          std::to_string(n_x) + ", ny=" + std::to_string(n_y) +
                          ")");
  }
  if (n_x + n_y - n11 > n_total) {
    throw MarginViolation("margins nx=" + std::to_string(n_x) +
                          ", ny=" + std::to_string(n_y) +
                          " do not fit in total " + std::to_string(n_total));
  }
  return ContingencyTable(n11, n_x, n_y, n_total);
}

std::string_view measure_name(MeasureId m) noexcept {
  return kNames[index_of(m)];
}

std::optional<MeasureId> find_measure(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kMeasureCount; ++i) {
    if (kNames[i] == name) return kAllMeasures[i];
  }
  return std::nullopt;
}

MeasureId parse_measure(std::string_view name) {
  if (auto m = find_measure(name)) return *m;
  throw UnknownMeasure("unknown measure '" + std::string(name) + "'");
}

double compute_measure(MeasureId m, const ContingencyTable& t) {
  const double n11 = static_cast<double>(t.n11());
  const double nx = static_cast<double>(t.n_x());
  const double ny = static_cast<double>(t.n_y());
  const double total = static_cast<double>(t.n_total());

  switch (m) {
    case MeasureId::MI:
      return std::log2(n11 * total / (nx * ny));
    case MeasureId::MI3:
      return std::log2(n11 * n11 * n11 * total / (nx * ny));
    case MeasureId::Dice:
      return 2.0 * n11 / (nx + ny);
    case MeasureId::L: {
      const Count not_x = t.n_total() - t.n_x();
      const Count not_y = t.n_total() - t.n_y();
      const double sum = g2_term(t.n11(), t.n_x(), t.n_y(), t.n_total()) +
                         g2_term(t.n12(), t.n_x(), not_y, t.n_total()) +
                         g2_term(t.n21(), not_x, t.n_y(), t.n_total()) +
                         g2_term(t.n22(), not_x, not_y, t.n_total());
      // Rounding can push an independent table a hair below zero.
      return std::max(0.0, 2.0 * sum);
    }
    case MeasureId::OccL:
      throw UnsupportedMeasure(
          "OccL is an ordering; use occl_compare or occl_key");
    case MeasureId::Ass:
      return n11 * n11 / (nx * ny);
    case MeasureId::SeSc:
      return n11 / smoothed(t.n12());
    case MeasureId::J: {
      const double px = nx / total;
      const double py = ny / total;
      const double p_y_given_x = n11 / nx;
      const double p_not_y_given_x = static_cast<double>(t.n12()) / nx;
      return px * (plogq(p_y_given_x, py) + plogq(p_not_y_given_x, 1.0 - py));
    }
    case MeasureId::Conv:
      return nx * (total - ny) / (total * smoothed(t.n12()));
    case MeasureId::LC:
      return (n11 - static_cast<double>(t.n12())) / ny;
    case MeasureId::CM:
      return n11 * (total - ny) / (ny * smoothed(t.n12()));
    case MeasureId::Khi2: {
      const double cross =
          n11 * static_cast<double>(t.n22()) -
          static_cast<double>(t.n12()) * static_cast<double>(t.n21());
      const double denom = smoothed(t.n_x()) *
                           smoothed(t.n_total() - t.n_x()) *
                           smoothed(t.n_y()) *
                           smoothed(t.n_total() - t.n_y());
      return total * cross * cross / denom;
    }
    case MeasureId::Ttest: {
      const double pxy = n11 / total;
      return (pxy - (nx / total) * (ny / total)) / std::sqrt(pxy / total);
    }
  }
  throw UnsupportedMeasure("invalid measure id");
}

Ordering occl_compare(const OccLEntry& a, const OccLEntry& b) noexcept {
  if (a.table.n11() != b.table.n11()) {
    return a.table.n11() > b.table.n11() ? Ordering::a_first
                                         : Ordering::b_first;
  }
  if (a.l_score != b.l_score) {
    return a.l_score > b.l_score ? Ordering::a_first : Ordering::b_first;
  }
  return Ordering::equal;
}

double occl_key(Count n11, double l_score) noexcept {
  const double l = std::max(0.0, l_score);
  return static_cast<double>(n11) + l / (1.0 + l);
}

std::array<double, kMeasureCount> raw_scores(const ContingencyTable& t) {
  std::array<double, kMeasureCount> out{};
  for (MeasureId m : kAllMeasures) {
    if (m == MeasureId::OccL) continue;
    out[index_of(m)] = compute_measure(m, t);
  }
  out[index_of(MeasureId::OccL)] =
      occl_key(t.n11(), out[index_of(MeasureId::L)]);
  return out;
}

}  // namespace termrank
