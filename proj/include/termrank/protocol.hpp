#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "termrank/evolve.hpp"
#include "termrank/feature_matrix.hpp"
#include "termrank/folds.hpp"
#include "termrank/ranker.hpp"
#include "termrank/rocauc.hpp"

namespace termrank {

struct ExperimentOptions {
  std::size_t folds = 5;
  std::size_t repetitions = 10;
  std::size_t jobs = 1;
  NormalizationMode mode = NormalizationMode::minmax;
};

// Test-fold result of one (repetition, fold) cell.
struct FoldOutcome {
  std::size_t repetition = 0;
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  // methods[0] is the ensemble, then one entry per feature column.
  std::vector<double> auc;
  std::vector<RocCurve> roc;
  double seconds = 0.0;  // wall time; not part of the written report
};

// Spread of one method's AUC under the three possible conventions.
struct AucSummary {
  double mean = 0.0;
  double std_all = 0.0;         // over every (repetition, fold) cell
  double std_within_rep = 0.0;  // fold spread, averaged over repetitions
  double std_between_rep = 0.0; // spread of per-repetition means
};

struct ExperimentReport {
  std::size_t folds = 0;
  std::size_t repetitions = 0;
  std::size_t runs = 0;
  std::vector<std::string> methods;  // "ensemble", then the feature columns
  std::vector<FoldOutcome> outcomes; // repetition-major
  std::vector<AucSummary> summary;   // per method
  std::vector<RocCurve> averaged;    // per method, over every cell
  std::size_t representative_cell = 0;  // index into outcomes
  EnsembleModel representative_model;
  std::vector<EnsembleModel> models;    // per cell, same order as outcomes
};

// Repeated stratified cross-validation. In every cell the feature scaling
// and the ensemble are fitted on the training folds only; the ensemble and
// every standalone column are scored on the held-out fold.
ExperimentReport run_experiment(const FeatureMatrix& data, const EsConfig& cfg,
                                const ExperimentOptions& options = {});

// Sample standard deviation; 0 for fewer than two values.
double sample_std(std::span<const double> values);

AucSummary summarize(std::span<const double> per_cell, std::size_t repetitions,
                     std::size_t folds);

std::string format_summary(const ExperimentReport& report);

// summary.txt, folds.tsv, roc/*.csv, models/rep<r>_fold<f>.json and
// representative_model.json.
// Everything written is a pure function of data, config and seed.
void write_report(const ExperimentReport& report,
                  const std::filesystem::path& out_dir);

// Member whose normalized scores deviate least (mean absolute difference)
// from the ensemble's over `data`; lowest index on ties.
std::pair<std::size_t, Hypothesis> representative_hypothesis(
    const EnsembleModel& model, const FeatureMatrix& data);

struct RankRow {
  std::string id;
  std::vector<std::size_t> measure_ranks;
  std::size_t ensemble_rank = 0;
};

struct RankTable {
  std::size_t member = 0;
  Hypothesis hypothesis;
  std::vector<std::string> columns;          // every feature column
  std::vector<std::string> measures;         // the compared subset
  std::vector<std::size_t> measure_columns;  // their column indices
  std::vector<RankRow> rows;
};

// Dense ranks, best = 1: descending raw value for a measure, descending
// ensemble score for the ensemble. Rows are the top_k candidates under the
// ensemble followed by the top_k under each measure, without repeats.
// Unknown measure names throw UnknownMeasure.
RankTable rank_comparison_table(const EnsembleModel& model,
                                const FeatureMatrix& data,
                                const std::vector<std::string>& measures,
                                std::size_t top_k);

std::string format_rank_table(const RankTable& table);

// Dense descending ranks (1 = largest value).
std::vector<std::size_t> dense_ranks(std::span<const double> values);

}  // namespace termrank
