#include "termrank/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "termrank/error.hpp"
#include "termrank/io.hpp"
#include "termrank/parallel.hpp"
#include "termrank/seeds.hpp"

namespace termrank {

namespace {

constexpr std::uint64_t kFoldStream = 0x464f4c44;  // "FOLD"
constexpr std::uint64_t kCellStream = 0x43454c4c;  // "CELL"

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

struct Cell {
  FeatureMatrix train;
  FeatureMatrix test;
  LabeledData train_data;
  std::uint64_t seed = 0;
};

std::vector<std::size_t> order_desc(std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return values[a] > values[b];
  });
  return idx;
}

}  // namespace

// ------------------------------------------------------------------ folds

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) rows.push_back(i);
  }
  return rows;
}

FoldPlan stratified_folds(std::span<const Label> labels, std::size_t k,
                          std::uint64_t seed) {
  if (k < 2) throw ConfigError("need at least 2 folds");
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (is_positive(labels[i]) ? pos : neg).push_back(i);
  }
  if (pos.size() < k || neg.size() < k) {
    throw TooFewExamples("each class needs at least " + std::to_string(k) +
                         " examples (positives: " + std::to_string(pos.size()) +
                         ", negatives: " + std::to_string(neg.size()) + ")");
  }
  Rng rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);

  FoldPlan plan;
  plan.k = k;
  plan.assignment.assign(labels.size(), 0);
  std::size_t next = 0;
  for (const auto* cls : {&pos, &neg}) {
    for (std::size_t i : *cls) {
      plan.assignment[i] = next;
      next = (next + 1) % k;
    }
  }
  return plan;
}

// ------------------------------------------------------------- statistics

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                      static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

AucSummary summarize(std::span<const double> per_cell, std::size_t repetitions,
                     std::size_t folds) {
  if (per_cell.size() != repetitions * folds || per_cell.empty()) {
    throw DimensionMismatch("per-cell AUC count does not match the grid");
  }
  AucSummary s;
  s.mean = std::accumulate(per_cell.begin(), per_cell.end(), 0.0) /
           static_cast<double>(per_cell.size());
  s.std_all = sample_std(per_cell);
  std::vector<double> rep_means;
  double within = 0.0;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto row = per_cell.subspan(r * folds, folds);
    rep_means.push_back(std::accumulate(row.begin(), row.end(), 0.0) /
                        static_cast<double>(folds));
    within += sample_std(row);
  }
  s.std_within_rep = within / static_cast<double>(repetitions);
  s.std_between_rep = sample_std(rep_means);
  return s;
}

// ------------------------------------------------------------- experiment

ExperimentReport run_experiment(const FeatureMatrix& data, const EsConfig& cfg,
                                const ExperimentOptions& options) {
  validate(cfg);
  if (options.repetitions < 1) throw ConfigError("need at least 1 repetition");
  if (!data.fully_labeled()) {
    throw SchemaError("every candidate needs a label for an experiment");
  }
  std::vector<Label> labels;
  labels.reserve(data.size());
  for (const auto& c : data.candidates()) labels.push_back(*c.label);
  const auto positives = std::count(labels.begin(), labels.end(), Label::positive);
  if (positives == 0 || static_cast<std::size_t>(positives) == labels.size()) {
    throw SingleClass("experiment data needs both classes");
  }

  const std::size_t reps = options.repetitions;
  const std::size_t k = options.folds;
  const std::size_t d = data.dimension();

  std::vector<Cell> cells;
  cells.reserve(reps * k);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto plan = stratified_folds(
        labels, k, derive_seed(cfg.master_seed, kFoldStream, r));
    for (std::size_t f = 0; f < k; ++f) {
      const auto train_rows = plan.train_rows(f);
      const auto test_rows = plan.test_rows(f);
      Cell cell;
      cell.train = data.refit_subset(train_rows, options.mode);
      cell.test = data.project_subset(test_rows, cell.train.normalizer());
      cell.train_data = labeled_data(cell.train);
      cell.seed = derive_seed(cfg.master_seed, kCellStream, r * k + f);
      cells.push_back(std::move(cell));
    }
  }

  // Every run of every cell is one independent task.
  const std::size_t runs = cfg.runs;
  std::vector<std::vector<Hypothesis>> hypotheses(
      cells.size(), std::vector<Hypothesis>(runs));
  std::vector<double> run_seconds(cells.size() * runs, 0.0);
  parallel_for(cells.size() * runs, options.jobs, [&](std::size_t task) {
    const std::size_t c = task / runs;
    const std::size_t j = task % runs;
    const auto start = std::chrono::steady_clock::now();
    hypotheses[c][j] =
        run_es(cells[c].train_data, cfg, run_seed(cells[c].seed, j)).hypothesis;
    run_seconds[task] = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  });

  ExperimentReport report;
  report.folds = k;
  report.repetitions = reps;
  report.runs = runs;
  report.methods.push_back("ensemble");
  for (const auto& col : data.columns()) report.methods.push_back(col);

  std::vector<EnsembleModel> models;
  models.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto start = std::chrono::steady_clock::now();
    const Cell& cell = cells[c];
    models.push_back(assemble_ensemble(std::move(hypotheses[c]),
                                       cell.train_data, cell.train));
    std::vector<Label> test_labels;
    for (const auto& cand : cell.test.candidates()) {
      test_labels.push_back(*cand.label);
    }

    FoldOutcome out;
    out.repetition = c / k;
    out.fold = c % k;
    out.train_size = cell.train.size();
    out.test_size = cell.test.size();
    const auto scores = ensemble_scores(models.back(), cell.test);
    out.auc.push_back(auc(scores, test_labels));
    out.roc.push_back(roc_points(scores, test_labels));
    std::vector<double> column(cell.test.size());
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t i = 0; i < cell.test.size(); ++i) {
        column[i] = cell.test.candidates()[i].raw[j];
      }
      out.auc.push_back(auc(column, test_labels));
      out.roc.push_back(roc_points(column, test_labels));
    }
    out.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    for (std::size_t j = 0; j < runs; ++j) {
      out.seconds += run_seconds[c * runs + j];
    }
    report.outcomes.push_back(std::move(out));
  }

  std::vector<double> per_cell(report.outcomes.size());
  std::vector<RocCurve> curves(report.outcomes.size());
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    for (std::size_t c = 0; c < report.outcomes.size(); ++c) {
      per_cell[c] = report.outcomes[c].auc[m];
      curves[c] = report.outcomes[c].roc[m];
    }
    report.summary.push_back(summarize(per_cell, reps, k));
    report.averaged.push_back(average_curves(curves));
  }

  const double mean = report.summary.front().mean;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < report.outcomes.size(); ++c) {
    const double gap = std::abs(report.outcomes[c].auc.front() - mean);
    if (gap < best_gap) {
      best_gap = gap;
      report.representative_cell = c;
    }
  }
  report.representative_model = models[report.representative_cell];
  report.models = std::move(models);
  return report;
}

std::string format_summary(const ExperimentReport& report) {
  std::ostringstream out;
  out << "Cross-validated ranking accuracy (AUC on held-out folds)\n";
  out << "folds: " << report.folds << "  repetitions: " << report.repetitions
      << "  runs per fold: " << report.runs << "\n";
  const auto& rep = report.outcomes.at(report.representative_cell);
  out << "representative fold: repetition " << rep.repetition << ", fold "
      << rep.fold << " (ensemble AUC " << fixed(rep.auc.front()) << ")\n\n";

  out << pad("method", 12) << pad("mean", 9) << pad("std(all)", 10)
      << pad("std(folds)", 12) << "std(reps)\n";
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    const auto& s = report.summary[m];
    out << pad(report.methods[m], 12) << pad(fixed(s.mean), 9)
        << pad(fixed(s.std_all), 10) << pad(fixed(s.std_within_rep), 12)
        << fixed(s.std_between_rep) << "\n";
  }

  out << "\nstandalone criteria (mean AUC)\n";
  for (std::size_t m = 1; m < report.methods.size(); ++m) {
    out << pad(report.methods[m], 8);
  }
  out << "\n";
  for (std::size_t m = 1; m < report.methods.size(); ++m) {
    out << pad(fixed(report.summary[m].mean, 2), 8);
  }
  out << "\n";
  return out.str();
}

void write_report(const ExperimentReport& report,
                  const std::filesystem::path& out_dir) {
  std::error_code ec;
  for (const char* sub : {"roc", "models"}) {
    std::filesystem::create_directories(out_dir / sub, ec);
    if (ec) {
      throw IoError("cannot create '" + (out_dir / sub).string() +
                    "': " + ec.message());
    }
  }
  write_file(out_dir / "summary.txt", format_summary(report));

  std::ostringstream tsv;
  tsv << "repetition\tfold\tmethod\tauc\n";
  for (const auto& o : report.outcomes) {
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
      tsv << o.repetition << '\t' << o.fold << '\t' << report.methods[m]
          << '\t' << format_double(o.auc[m]) << '\n';
    }
  }
  write_file(out_dir / "folds.tsv", tsv.str());

  for (const auto& o : report.outcomes) {
    save_roc_csv(o.roc.front(), out_dir / "roc" /
                                    ("rep" + std::to_string(o.repetition) +
                                     "_fold" + std::to_string(o.fold) +
                                     "_ensemble.csv"));
  }
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    save_roc_csv(report.averaged[m],
                 out_dir / "roc" / ("mean_" + report.methods[m] + ".csv"));
  }
  for (std::size_t c = 0; c < report.models.size(); ++c) {
    const auto& o = report.outcomes[c];
    save_model(report.models[c],
               out_dir / "models" /
                   ("rep" + std::to_string(o.repetition) + "_fold" +
                    std::to_string(o.fold) + ".json"));
  }
  save_model(report.representative_model,
             out_dir / "representative_model.json");
}

// ------------------------------------------------------------- inspection

std::pair<std::size_t, Hypothesis> representative_hypothesis(
    const EnsembleModel& model, const FeatureMatrix& data) {
  if (model.members.empty()) throw EmptyInput("ensemble has no members");
  if (data.size() == 0) throw EmptyInput("no candidates to compare on");
  const auto ensemble = ensemble_scores(model, data);
  std::size_t best = 0;
  double best_dev = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < model.members.size(); ++m) {
    double dev = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      dev += std::abs(
          member_score(model.members[m], data.candidates()[i].features) -
          ensemble[i]);
    }
    dev /= static_cast<double>(data.size());
    if (dev < best_dev) {
      best_dev = dev;
      best = m;
    }
  }
  return {best, model.members[best].hypothesis};
}

std::vector<std::size_t> dense_ranks(std::span<const double> values) {
  const auto order = order_desc(values);
  std::vector<std::size_t> ranks(values.size());
  std::size_t rank = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || values[order[i]] != values[order[i - 1]]) ++rank;
    ranks[order[i]] = rank;
  }
  return ranks;
}

RankTable rank_comparison_table(const EnsembleModel& model,
                                const FeatureMatrix& data,
                                const std::vector<std::string>& measures,
                                std::size_t top_k) {
  RankTable table;
  table.columns = data.columns();
  for (const auto& name : measures) {
    const auto it =
        std::find(table.columns.begin(), table.columns.end(), name);
    if (it == table.columns.end()) {
      throw UnknownMeasure("unknown measure '" + name + "'");
    }
    table.measures.push_back(name);
    table.measure_columns.push_back(
        static_cast<std::size_t>(it - table.columns.begin()));
  }
  auto [member, hypothesis] = representative_hypothesis(model, data);
  table.member = member;
  table.hypothesis = std::move(hypothesis);

  const std::size_t n = data.size();
  const auto ensemble = ensemble_scores(model, data);
  const auto ensemble_rank = dense_ranks(ensemble);
  std::vector<std::vector<std::size_t>> measure_rank;
  std::vector<std::vector<std::size_t>> measure_order;
  std::vector<double> column(n);
  for (std::size_t j : table.measure_columns) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = data.candidates()[i].raw[j];
    }
    measure_rank.push_back(dense_ranks(column));
    measure_order.push_back(order_desc(column));
  }

  std::vector<bool> taken(n, false);
  auto take_top = [&](const std::vector<std::size_t>& order) {
    for (std::size_t i = 0; i < std::min(top_k, order.size()); ++i) {
      const std::size_t row = order[i];
      if (taken[row]) continue;
      taken[row] = true;
      RankRow r;
      r.id = data.candidates()[row].id;
      for (const auto& ranks : measure_rank) r.measure_ranks.push_back(ranks[row]);
      r.ensemble_rank = ensemble_rank[row];
      table.rows.push_back(std::move(r));
    }
  };
  take_top(order_desc(ensemble));
  for (const auto& order : measure_order) take_top(order);
  return table;
}

std::string format_rank_table(const RankTable& table) {
  const Hypothesis& h = table.hypothesis;
  const bool centered = h.kind == HypothesisKind::weighted_l1;
  auto center = [&](std::size_t j) {
    return centered ? fixed(h.c[j], 2) : std::string("n/a");
  };
  std::ostringstream out;
  out << "# representative member " << table.member << " ("
      << kind_name(h.kind) << ")\n";
  out << "# feature\tw\tc\n";
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    out << "# " << table.columns[j] << '\t' << fixed(h.w[j], 2) << '\t'
        << center(j) << '\n';
  }
  for (std::size_t m = 0; m < table.measures.size(); ++m) {
    const std::size_t j = table.measure_columns[m];
    const auto& name = table.measures[m];
    out << "# " << name << ": w_" << name << " = " << fixed(h.w[j], 2)
        << ", c_" << name << " = " << center(j) << '\n';
  }
  out << "id";
  for (const auto& name : table.measures) out << "\trank_" << name;
  out << "\trank_ensemble\n";
  for (const auto& r : table.rows) {
    out << r.id;
    for (std::size_t rank : r.measure_ranks) out << '\t' << rank;
    out << '\t' << r.ensemble_rank << '\n';
  }
  return out.str();
}

}  // namespace termrank
