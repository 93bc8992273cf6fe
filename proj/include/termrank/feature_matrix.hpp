#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "termrank/label.hpp"
#include "termrank/measures.hpp"

namespace termrank {

enum class NormalizationMode { minmax, rank };

std::string_view mode_name(NormalizationMode mode) noexcept;
std::optional<NormalizationMode> parse_mode(std::string_view s) noexcept;

enum class ScalingKind { minmax, rank };

// Maps one raw column onto [0,1]. Fitted on a training split and reusable
// on unseen values, which are clamped into range.
struct ColumnScaling {
  ScalingKind kind = ScalingKind::minmax;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> sorted;  // rank kind: training values, ascending

  static ColumnScaling fit(std::span<const double> values, ScalingKind kind);

  double apply(double raw) const noexcept;

  friend bool operator==(const ColumnScaling&, const ColumnScaling&) = default;
};

class FeatureNormalizer {
 public:
  FeatureNormalizer() = default;
  FeatureNormalizer(NormalizationMode mode, std::vector<ColumnScaling> columns)
      : mode_(mode), columns_(std::move(columns)) {}

  // `rank_columns[j]` forces rank scaling for column j whatever the mode.
  static FeatureNormalizer fit(std::span<const std::vector<double>> raw_rows,
                               NormalizationMode mode,
                               const std::vector<bool>& rank_columns);

  std::vector<double> apply(std::span<const double> raw) const;

  NormalizationMode mode() const noexcept { return mode_; }
  std::size_t dimension() const noexcept { return columns_.size(); }
  const std::vector<ColumnScaling>& columns() const noexcept {
    return columns_;
  }

  friend bool operator==(const FeatureNormalizer&,
                         const FeatureNormalizer&) = default;

 private:
  NormalizationMode mode_ = NormalizationMode::minmax;
  std::vector<ColumnScaling> columns_;
};

struct Candidate {
  std::string id;
  std::vector<double> raw;
  std::vector<double> features;  // filled by FeatureMatrix
  std::optional<Label> label;
};

class FeatureMatrix {
 public:
  FeatureMatrix() = default;

  // Fits normalization on `rows`. A column named "OccL" is always
  // rank-encoded.
  static FeatureMatrix fit(std::vector<std::string> columns,
                           std::vector<Candidate> rows,
                           NormalizationMode mode);

  // Applies an existing normalization (e.g. one fitted on a training split).
  static FeatureMatrix with_normalizer(std::vector<std::string> columns,
                                       std::vector<Candidate> rows,
                                       FeatureNormalizer normalizer);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<Candidate>& candidates() const noexcept { return rows_; }
  const FeatureNormalizer& normalizer() const noexcept { return normalizer_; }
  std::size_t dimension() const noexcept { return columns_.size(); }
  std::size_t size() const noexcept { return rows_.size(); }
  bool fully_labeled() const noexcept;

  // Rows selected by index, normalization refitted on them.
  FeatureMatrix refit_subset(std::span<const std::size_t> rows,
                             NormalizationMode mode) const;
  // Rows selected by index, normalized with `normalizer`.
  FeatureMatrix project_subset(std::span<const std::size_t> rows,
                               const FeatureNormalizer& normalizer) const;

 private:
  std::vector<std::string> columns_;
  std::vector<Candidate> rows_;
  FeatureNormalizer normalizer_;
};

struct CountedCandidate {
  std::string id;
  ContingencyTable table;
  std::optional<Label> label;
};

// Column names of the 13 association measures in MeasureId order.
std::vector<std::string> measure_columns();

// Needs at least two candidates.
FeatureMatrix build_feature_matrix(std::span<const CountedCandidate> candidates,
                                   NormalizationMode mode);

// Row-major normalized features with labels; the learner's input.
struct LabeledData {
  std::size_t dimension = 0;
  std::vector<double> x;
  std::vector<Label> y;

  std::size_t size() const noexcept { return y.size(); }
  std::span<const double> row(std::size_t i) const noexcept {
    return {x.data() + i * dimension, dimension};
  }
  std::size_t positives() const noexcept;
};

// Throws SchemaError if any candidate is unlabeled.
LabeledData labeled_data(const FeatureMatrix& m);

}  // namespace termrank
