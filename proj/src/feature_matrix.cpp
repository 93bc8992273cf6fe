#include "termrank/feature_matrix.hpp"

#include <algorithm>

#include "termrank/error.hpp"

namespace termrank {

std::string_view mode_name(NormalizationMode mode) noexcept {
  return mode == NormalizationMode::rank ? "rank" : "minmax";
}

std::optional<NormalizationMode> parse_mode(std::string_view s) noexcept {
  if (s == "minmax") return NormalizationMode::minmax;
  if (s == "rank") return NormalizationMode::rank;
  return std::nullopt;
}

ColumnScaling ColumnScaling::fit(std::span<const double> values,
                                 ScalingKind kind) {
  if (values.empty()) throw EmptyInput("cannot fit scaling on no values");
  ColumnScaling s;
  s.kind = kind;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.lo = *lo;
  s.hi = *hi;
  if (kind == ScalingKind::rank) {
    s.sorted.assign(values.begin(), values.end());
    std::sort(s.sorted.begin(), s.sorted.end());
  }
  return s;
}

double ColumnScaling::apply(double raw) const noexcept {
  if (kind == ScalingKind::minmax) {
    if (!(hi > lo)) return 0.5;
    return std::clamp((raw - lo) / (hi - lo), 0.0, 1.0);
  }
  const auto n = sorted.size();
  if (n < 2) return 0.5;
  // Mid-rank of `raw` among the training values, ascending, in [0, n-1].
  const auto first = std::lower_bound(sorted.begin(), sorted.end(), raw);
  const auto last = std::upper_bound(first, sorted.end(), raw);
  const double below = static_cast<double>(first - sorted.begin());
  const double equal = static_cast<double>(last - first);
  const double rank = equal > 0 ? below + (equal - 1.0) / 2.0 : below - 0.5;
  const double top = static_cast<double>(n - 1);
  return std::clamp(rank, 0.0, top) / top;
}

FeatureNormalizer FeatureNormalizer::fit(
    std::span<const std::vector<double>> raw_rows, NormalizationMode mode,
    const std::vector<bool>& rank_columns) {
  if (raw_rows.empty()) throw EmptyInput("no rows to fit normalization on");
  const std::size_t d = raw_rows.front().size();
  std::vector<ColumnScaling> columns;
  columns.reserve(d);
  std::vector<double> column(raw_rows.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < raw_rows.size(); ++i) {
      if (raw_rows[i].size() != d) {
        throw DimensionMismatch("ragged raw feature rows");
      }
      column[i] = raw_rows[i][j];
    }
    const bool force_rank = j < rank_columns.size() && rank_columns[j];
    const ScalingKind kind = (force_rank || mode == NormalizationMode::rank)
                                 ? ScalingKind::rank
                                 : ScalingKind::minmax;
    columns.push_back(ColumnScaling::fit(column, kind));
  }
  return FeatureNormalizer(mode, std::move(columns));
}

std::vector<double> FeatureNormalizer::apply(std::span<const double> raw) const {
  if (raw.size() != columns_.size()) {
    throw DimensionMismatch("expected " + std::to_string(columns_.size()) +
                            " raw values, got " + std::to_string(raw.size()));
  }
  std::vector<double> out(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    out[j] = columns_[j].apply(raw[j]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::fit(std::vector<std::string> columns,
                                 std::vector<Candidate> rows,
                                 NormalizationMode mode) {
  if (rows.empty()) throw EmptyInput("feature matrix has no candidates");
  std::vector<std::vector<double>> raw;
  raw.reserve(rows.size());
  for (const auto& r : rows) raw.push_back(r.raw);
  std::vector<bool> rank_columns(columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    rank_columns[j] = columns[j] == measure_name(MeasureId::OccL);
  }
  auto normalizer = FeatureNormalizer::fit(raw, mode, rank_columns);
  return with_normalizer(std::move(columns), std::move(rows),
                         std::move(normalizer));
}

FeatureMatrix FeatureMatrix::with_normalizer(std::vector<std::string> columns,
                                             std::vector<Candidate> rows,
                                             FeatureNormalizer normalizer) {
  if (normalizer.dimension() != columns.size()) {
    throw DimensionMismatch("normalizer dimension " +
                            std::to_string(normalizer.dimension()) +
                            " does not match " +
                            std::to_string(columns.size()) + " columns");
  }
  FeatureMatrix m;
  m.columns_ = std::move(columns);
  m.rows_ = std::move(rows);
  m.normalizer_ = std::move(normalizer);
  for (auto& r : m.rows_) r.features = m.normalizer_.apply(r.raw);
  return m;
}

bool FeatureMatrix::fully_labeled() const noexcept {
  return std::all_of(rows_.begin(), rows_.end(),
                     [](const Candidate& c) { return c.label.has_value(); });
}

FeatureMatrix FeatureMatrix::refit_subset(std::span<const std::size_t> rows,
                                          NormalizationMode mode) const {
  std::vector<Candidate> picked;
  picked.reserve(rows.size());
  for (std::size_t i : rows) picked.push_back(rows_.at(i));
  return fit(columns_, std::move(picked), mode);
}

FeatureMatrix FeatureMatrix::project_subset(
    std::span<const std::size_t> rows,
    const FeatureNormalizer& normalizer) const {
  std::vector<Candidate> picked;
  picked.reserve(rows.size());
  for (std::size_t i : rows) picked.push_back(rows_.at(i));
  return with_normalizer(columns_, std::move(picked), normalizer);
}

std::vector<std::string> measure_columns() {
  std::vector<std::string> names;
  names.reserve(kMeasureCount);
  for (MeasureId m : kAllMeasures) names.emplace_back(measure_name(m));
  return names;
}

FeatureMatrix build_feature_matrix(std::span<const CountedCandidate> candidates,
                                   NormalizationMode mode) {
  if (candidates.empty()) throw EmptyInput("no candidates");
  if (candidates.size() < 2) {
    throw DegenerateDataset("at least two candidates are needed to normalize");
  }
  std::vector<Candidate> rows;
  rows.reserve(candidates.size());
  for (const auto& c : candidates) {
    const auto scores = raw_scores(c.table);
    rows.push_back(Candidate{c.id, std::vector<double>(scores.begin(),
                                                       scores.end()),
                             {}, c.label});
  }
  return FeatureMatrix::fit(measure_columns(), std::move(rows), mode);
}

std::size_t LabeledData::positives() const noexcept {
  return static_cast<std::size_t>(
      std::count(y.begin(), y.end(), Label::positive));
}

LabeledData labeled_data(const FeatureMatrix& m) {
  LabeledData data;
  data.dimension = m.dimension();
  data.x.reserve(m.size() * m.dimension());
  data.y.reserve(m.size());
  for (const auto& c : m.candidates()) {
    if (!c.label) {
      throw SchemaError("candidate '" + c.id + "' has no label");
    }
    data.x.insert(data.x.end(), c.features.begin(), c.features.end());
    data.y.push_back(*c.label);
  }
  return data;
}

}  // namespace termrank
