#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "termrank/feature_matrix.hpp"
#include "termrank/ranker.hpp"

namespace termrank {

// (mu + lambda) evolution strategy settings. Defaults: mu 20, lambda 100,
// crossover 0.6, mutation 1.0, 21 runs.
struct EsConfig {
  std::size_t mu = 20;
  std::size_t lambda = 100;
  double crossover_rate = 0.6;
  double mutation_rate = 1.0;
  std::size_t generations = 100;
  HypothesisKind kind = HypothesisKind::weighted_l1;
  std::size_t runs = 21;
  double sigma_init = 0.1;
  std::uint64_t master_seed = 0;
  // 0 scores fitness on the whole training split; k >= 2 averages the AUC
  // over k stratified subsets of it.
  std::size_t internal_cv_folds = 0;

  friend bool operator==(const EsConfig&, const EsConfig&) = default;
};

// Throws ConfigError.
void validate(const EsConfig& cfg);

// Parses flat `key=value` lines ('#' comments, blank lines allowed) on
// top of `base`. Keys mirror the field names; `T_runs` and `seed` are
// accepted aliases. Unknown keys throw ConfigError.
EsConfig parse_config(const std::string& text, EsConfig base = {});

using Rng = std::mt19937_64;

struct Individual {
  std::vector<double> genome;  // w, then c for weighted-L1
  std::vector<double> sigma;
  std::optional<double> fitness;
};

std::size_t genome_length(HypothesisKind kind, std::size_t d) noexcept;

// Weights uniform in [-1,1], centers uniform in [0,1], sigma = sigma_init.
std::vector<Individual> init_population(const EsConfig& cfg, std::size_t d,
                                        std::uint64_t seed);

// Log-normal self-adaptation of every step size, then a Gaussian step on
// every coordinate. Applied with probability cfg.mutation_rate.
Individual mutate(const Individual& parent, const EsConfig& cfg, Rng& rng);

// Uniform crossover with probability cfg.crossover_rate; each coordinate
// takes genome and sigma from the same parent. Otherwise a copy of p1.
Individual crossover(const Individual& p1, const Individual& p2,
                     const EsConfig& cfg, Rng& rng);

Hypothesis to_hypothesis(const Individual& ind, HypothesisKind kind,
                         std::size_t d);

struct EsRun {
  Hypothesis hypothesis;
  double fitness = 0.0;
  // Best parent fitness after initialization and after every generation.
  std::vector<double> best_per_generation;
};

EsRun run_es(const LabeledData& train, const EsConfig& cfg,
             std::uint64_t run_seed);

// Seed of the k-th independent run under `master_seed`.
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t k) noexcept;

// Fits each member's score normalizer on the training data.
EnsembleModel assemble_ensemble(std::vector<Hypothesis> hypotheses,
                                const LabeledData& train,
                                const FeatureMatrix& source);

// cfg.runs independent runs, combined into a median ensemble. `jobs`
// bounds the worker threads; the result does not depend on it.
EnsembleModel train_ensemble(const FeatureMatrix& train, const EsConfig& cfg,
                             std::size_t jobs = 1);

}  // namespace termrank
