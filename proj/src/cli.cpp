#include "termrank/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "termrank/corpus.hpp"
#include "termrank/error.hpp"
#include "termrank/evolve.hpp"
#include "termrank/io.hpp"
#include "termrank/protocol.hpp"

namespace termrank {

namespace {

struct EsFlags {
  std::string config_path;
  std::string kind = "l1";
  EsConfig cfg;
  std::size_t jobs = 1;
  CLI::Option* mu = nullptr;
  CLI::Option* lambda = nullptr;
  CLI::Option* generations = nullptr;
  CLI::Option* runs = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* kind_opt = nullptr;
  CLI::Option* crossover = nullptr;
  CLI::Option* mutation = nullptr;
  CLI::Option* sigma = nullptr;
  CLI::Option* internal_cv = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "key=value file with evolution settings; flags override it");
    kind_opt = cmd->add_option("--kind", kind, "hypothesis kind: linear or l1")
                   ->check(CLI::IsMember({"linear", "l1", "weighted_l1"}))
                   ->capture_default_str();
    mu = cmd->add_option("--mu", cfg.mu, "parents per generation")
             ->capture_default_str();
    lambda = cmd->add_option("--lambda", cfg.lambda, "offspring per generation")
                 ->capture_default_str();
    generations = cmd->add_option("--generations", cfg.generations,
                                  "generations per run")
                      ->capture_default_str();
    runs = cmd->add_option("--runs", cfg.runs, "independent runs in the ensemble")
               ->capture_default_str();
    seed = cmd->add_option("--seed", cfg.master_seed, "master random seed")
               ->capture_default_str();
    crossover = cmd->add_option("--crossover-rate", cfg.crossover_rate,
                                "uniform crossover probability")
                    ->capture_default_str();
    mutation = cmd->add_option("--mutation-rate", cfg.mutation_rate,
                               "probability an offspring is mutated")
                   ->capture_default_str();
    sigma = cmd->add_option("--sigma-init", cfg.sigma_init,
                            "initial mutation step size")
                ->capture_default_str();
    internal_cv = cmd->add_option("--internal-cv", cfg.internal_cv_folds,
                                  "fitness averaged over k subsets (0 = off)")
                      ->capture_default_str();
    cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  }

  // Config file first, explicit flags on top.
  EsConfig resolve() const {
    EsConfig out;
    if (!config_path.empty()) out = parse_config(read_file(config_path));
    if (mu->count()) out.mu = cfg.mu;
    if (lambda->count()) out.lambda = cfg.lambda;
    if (generations->count()) out.generations = cfg.generations;
    if (runs->count()) out.runs = cfg.runs;
    if (seed->count()) out.master_seed = cfg.master_seed;
    if (crossover->count()) out.crossover_rate = cfg.crossover_rate;
    if (mutation->count()) out.mutation_rate = cfg.mutation_rate;
    if (sigma->count()) out.sigma_init = cfg.sigma_init;
    if (internal_cv->count()) out.internal_cv_folds = cfg.internal_cv_folds;
    if (kind_opt->count()) out.kind = *parse_kind(kind);
    validate(out);
    return out;
  }
};

NormalizationMode mode_of(const std::string& s) {
  auto m = parse_mode(s);
  if (!m) throw ConfigError("unknown normalization mode '" + s + "'");
  return *m;
}

// Writes to `path`, or to `out` when the path is empty or "-".
template <typename Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  write(file);
  file.flush();
  if (!file) throw IoError("failed writing '" + path + "'");
}

FeatureMatrix project_for_model(const FeatureMatrix& data,
                                const EnsembleModel& model) {
  if (data.columns() != model.columns) {
    throw SchemaError("feature columns do not match the model's columns");
  }
  return FeatureMatrix::with_normalizer(data.columns(), data.candidates(),
                                        model.features);
}

void write_ranking(std::ostream& out, const FeatureMatrix& data,
                   const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  out << "rank\tid\tscore\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    out << (i + 1) << '\t' << data.candidates()[order[i]].id << '\t'
        << format_double(scores[order[i]]) << '\n';
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Collocation ranking with association measures and an "
               "AUC-maximizing evolution strategy",
               "termrank"};
  app.require_subcommand(1);

  // extract
  auto* extract = app.add_subcommand(
      "extract", "count candidate bigrams in a tagged corpus");
  std::string corpus_path;
  std::string pattern_text = "NOUN,NOUN";
  std::string tagset_text;
  Count min_freq = 1;
  std::string output;
  extract->add_option("corpus", corpus_path, "tagged corpus (surface<TAB>tag)")
      ->required();
  extract->add_option("--pattern", pattern_text, "tag pattern FIRST,SECOND")
      ->capture_default_str();
  extract->add_option("--min-freq", min_freq, "minimum pair count kept")
      ->capture_default_str();
  extract->add_option("--tagset", tagset_text,
                      "comma-separated tag set (default: UD UPOS tags)");
  extract->add_option("-o,--output", output, "counts TSV (default: stdout)");

  // features
  auto* features = app.add_subcommand(
      "features", "compute the 13 association measures from a counts file");
  std::string counts_path;
  std::string labels_path;
  features->add_option("counts", counts_path, "counts TSV")->required();
  features->add_option("--labels", labels_path, "label TSV (id<TAB>label)");
  features->add_option("-o,--output", output, "feature TSV (default: stdout)");

  // Commands reading a feature file.
  std::string features_path;
  std::string mode_text = "minmax";
  std::string model_path;
  auto add_features_input = [&](CLI::App* cmd) {
    cmd->add_option("features", features_path, "feature TSV")->required();
  };
  auto add_mode = [&](CLI::App* cmd) {
    cmd->add_option("--mode", mode_text, "feature normalization")
        ->check(CLI::IsMember({"minmax", "rank"}))
        ->capture_default_str();
  };

  // rank
  auto* rank = app.add_subcommand(
      "rank", "rank candidates by one measure or by a trained model");
  std::string measure_name_text;
  add_features_input(rank);
  auto* rank_measure =
      rank->add_option("--measure", measure_name_text, "measure name, e.g. J");
  auto* rank_model = rank->add_option("--model", model_path, "model file");
  rank_measure->excludes(rank_model);
  rank->add_option("-o,--output", output, "ranked TSV (default: stdout)");

  // train
  auto* train = app.add_subcommand("train", "train an ensemble model");
  EsFlags train_flags;
  add_features_input(train);
  add_mode(train);
  train_flags.attach(train);
  std::string model_out = "model.json";
  train->add_option("-o,--output", model_out, "model file")
      ->capture_default_str();

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "AUC and ROC curve of a model on labeled features");
  std::string out_dir;
  add_features_input(evaluate);
  evaluate->add_option("--model", model_path, "model file")->required();
  evaluate->add_option("--out-dir", out_dir, "directory for roc.csv");

  // experiment
  auto* experiment = app.add_subcommand(
      "experiment", "repeated stratified cross-validation report");
  EsFlags exp_flags;
  std::size_t folds = 5;
  std::size_t repetitions = 10;
  std::string report_dir = "report";
  add_features_input(experiment);
  add_mode(experiment);
  exp_flags.attach(experiment);
  experiment->add_option("--folds", folds, "cross-validation folds")
      ->capture_default_str();
  experiment->add_option("--repetitions", repetitions, "repeated splits")
      ->capture_default_str();
  experiment->add_option("--out-dir", report_dir, "report directory")
      ->capture_default_str();

  // inspect
  auto* inspect = app.add_subcommand(
      "inspect", "weights, centers and rank comparison of a model");
  std::vector<std::string> inspect_measures = {"MI", "OccL"};
  std::size_t top_k = 4;
  add_features_input(inspect);
  inspect->add_option("--model", model_path, "model file")->required();
  inspect->add_option("--measure", inspect_measures, "measures to compare")
      ->delimiter(',')
      ->capture_default_str();
  inspect->add_option("--top-k", top_k, "candidates taken from each ranking")
      ->capture_default_str();
  inspect->add_option("-o,--output", output, "table (default: stdout)");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*extract) {
      const TagSet tags = tagset_text.empty() ? TagSet() : TagSet::parse(tagset_text);
      CandidateCounter counter(TagPattern::parse(pattern_text), tags);
      std::ifstream in(corpus_path, std::ios::binary);
      if (!in) throw IoError("cannot open '" + corpus_path + "' for reading");
      for_each_sentence(in, tags,
                        [&](const Sentence& s) { counter.add_sentence(s); });
      const auto set = counter.finish(min_freq);
      err << "extracted " << set.entries.size() << " candidates from "
          << set.n_total << " " << pattern_text << " instances\n";
      emit(output, out, [&](std::ostream& o) { write_counts(set, o); });
    } else if (*features) {
      const auto set = load_counts(counts_path);
      auto matrix = build_feature_matrix(counted_candidates(set),
                                         NormalizationMode::minmax);
      if (!labels_path.empty()) {
        matrix = join_labels(matrix, std::filesystem::path(labels_path));
      }
      emit(output, out, [&](std::ostream& o) { write_features(matrix, o); });
    } else if (*rank) {
      if (!rank_measure->count() && !rank_model->count()) {
        throw ConfigError("rank needs --measure or --model");
      }
      const auto data = load_features(features_path);
      std::vector<double> scores;
      if (rank_measure->count()) {
        const std::size_t j = index_of(parse_measure(measure_name_text));
        for (const auto& c : data.candidates()) scores.push_back(c.raw[j]);
      } else {
        const auto model = load_model(model_path);
        scores = ensemble_scores(model, project_for_model(data, model));
      }
      emit(output, out, [&](std::ostream& o) { write_ranking(o, data, scores); });
    } else if (*train) {
      const EsConfig cfg = train_flags.resolve();
      const auto data = load_features(features_path, mode_of(mode_text));
      const auto model = train_ensemble(data, cfg, train_flags.jobs);
      save_model(model, model_out);
      err << "trained " << model.members.size() << " members, model written to "
          << model_out << "\n";
    } else if (*evaluate) {
      const auto model = load_model(model_path);
      const auto data = project_for_model(load_features(features_path), model);
      if (!data.fully_labeled()) {
        throw SchemaError("evaluate needs a label for every candidate");
      }
      std::vector<Label> labels;
      for (const auto& c : data.candidates()) labels.push_back(*c.label);
      const auto scores = ensemble_scores(model, data);
      const auto curve = roc_points(scores, labels);
      char buf[64];
      std::snprintf(buf, sizeof buf, "AUC %.6f\n", auc(scores, labels));
      out << buf;
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        save_roc_csv(curve, std::filesystem::path(out_dir) / "roc.csv");
      }
    } else if (*experiment) {
      const EsConfig cfg = exp_flags.resolve();
      const auto data = load_features(features_path);
      ExperimentOptions options;
      options.folds = folds;
      options.repetitions = repetitions;
      options.jobs = exp_flags.jobs;
      options.mode = mode_of(mode_text);
      const auto report = run_experiment(data, cfg, options);
      write_report(report, report_dir);
      for (const auto& o : report.outcomes) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "repetition %zu fold %zu: ensemble AUC %.4f (%.1f s)\n",
                      o.repetition, o.fold, o.auc.front(), o.seconds);
        err << buf;
      }
      out << format_summary(report);
    } else if (*inspect) {
      const auto model = load_model(model_path);
      const auto data = project_for_model(load_features(features_path), model);
      const auto table =
          rank_comparison_table(model, data, inspect_measures, top_k);
      emit(output, out,
           [&](std::ostream& o) { o << format_rank_table(table); });
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace termrank
