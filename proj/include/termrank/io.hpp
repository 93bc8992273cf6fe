#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "termrank/corpus.hpp"
#include "termrank/feature_matrix.hpp"
#include "termrank/ranker.hpp"
#include "termrank/rocauc.hpp"

namespace termrank {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// Counts TSV: a `#total=<N>` line, the header `id<TAB>n11<TAB>nx<TAB>ny`,
// then one row per candidate. Rows breaking the margin invariants throw
// SchemaError naming the line.
CandidateSet read_counts(std::istream& in);
void write_counts(const CandidateSet& set, std::ostream& out);
CandidateSet load_counts(const std::filesystem::path& path);
void save_counts(const CandidateSet& set, const std::filesystem::path& path);

std::vector<CountedCandidate> counted_candidates(const CandidateSet& set);

// Feature TSV: `id`, the 13 measure columns in MeasureId order holding raw
// scores, optional `label` column (-1/1). Normalization is fitted on load.
FeatureMatrix read_features(std::istream& in,
                            NormalizationMode mode = NormalizationMode::minmax);
void write_features(const FeatureMatrix& m, std::ostream& out);
FeatureMatrix load_features(const std::filesystem::path& path,
                            NormalizationMode mode = NormalizationMode::minmax);
void save_features(const FeatureMatrix& m, const std::filesystem::path& path);

// Label TSV `id<TAB>label`. Ids missing from `m` throw SchemaError.
FeatureMatrix join_labels(const FeatureMatrix& m, std::istream& labels);
FeatureMatrix join_labels(const FeatureMatrix& m,
                          const std::filesystem::path& labels);

// JSON model file.
std::string model_to_json(const EnsembleModel& model);
EnsembleModel model_from_json(const std::string& text);
void save_model(const EnsembleModel& model, const std::filesystem::path& path);
EnsembleModel load_model(const std::filesystem::path& path);

// `fpr,tpr` header then one row per point, 6 decimals.
void write_roc_csv(const RocCurve& curve, std::ostream& out);
void save_roc_csv(const RocCurve& curve, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace termrank
