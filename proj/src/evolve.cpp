#include "termrank/evolve.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "termrank/error.hpp"
#include "termrank/folds.hpp"
#include "termrank/parallel.hpp"
#include "termrank/rocauc.hpp"
#include "termrank/seeds.hpp"

namespace termrank {

namespace {

constexpr double kSigmaFloor = 1e-8;
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kFitnessStream = 0xf17e55;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid value '" + value + "' for " + key);
  }
  return out;
}

// One fitness subset stored column-major with positives first, so scoring
// runs down contiguous columns and needs no gather before the AUC count.
class Subset {
 public:
  Subset(const LabeledData& data, std::span<const std::size_t> rows)
      : d_(data.dimension) {
    std::vector<std::size_t> ordered;
    for (std::size_t r : rows) {
      if (is_positive(data.y[r])) ordered.push_back(r);
    }
    positives_ = ordered.size();
    for (std::size_t r : rows) {
      if (!is_positive(data.y[r])) ordered.push_back(r);
    }
    if (positives_ == 0 || positives_ == ordered.size()) {
      throw SingleClass("fitness subset needs both classes");
    }
    n_ = ordered.size();
    columns_.resize(d_ * n_);
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t k = 0; k < n_; ++k) {
        columns_[i * n_ + k] = data.x[ordered[k] * d_ + i];
      }
    }
    scores_.resize(n_);
  }

  double auc(std::span<const double> genome, HypothesisKind kind) {
    std::fill(scores_.begin(), scores_.end(), 0.0);
    double* s = scores_.data();
    for (std::size_t i = 0; i < d_; ++i) {
      const double* x = columns_.data() + i * n_;
      const double w = genome[i];
      if (kind == HypothesisKind::linear) {
        for (std::size_t k = 0; k < n_; ++k) s[k] += w * x[k];
      } else {
        const double c = genome[d_ + i];
        for (std::size_t k = 0; k < n_; ++k) s[k] += w * std::abs(x[k] - c);
      }
    }
    const std::span<double> all(scores_);
    return AucEvaluator::split_auc(all.first(positives_),
                                   all.subspan(positives_));
  }

 private:
  std::size_t d_ = 0;
  std::size_t n_ = 0;
  std::size_t positives_ = 0;
  std::vector<double> columns_;
  std::vector<double> scores_;
};

class Fitness {
 public:
  Fitness(const LabeledData& data, const EsConfig& cfg, std::uint64_t seed)
      : kind_(cfg.kind) {
    if (cfg.internal_cv_folds >= 2) {
      const auto plan = stratified_folds(data.y, cfg.internal_cv_folds, seed);
      for (std::size_t f = 0; f < plan.k; ++f) {
        subsets_.emplace_back(data, plan.test_rows(f));
      }
    } else {
      std::vector<std::size_t> rows(data.size());
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      subsets_.emplace_back(data, rows);
    }
  }

  double operator()(const Individual& ind) {
    double total = 0.0;
    for (auto& s : subsets_) total += s.auc(ind.genome, kind_);
    return total / static_cast<double>(subsets_.size());
  }

 private:
  HypothesisKind kind_;
  std::vector<Subset> subsets_;
};

}  // namespace

void validate(const EsConfig& cfg) {
  if (cfg.mu < 1) throw ConfigError("mu must be at least 1");
  if (cfg.lambda < 1) throw ConfigError("lambda must be at least 1");
  if (!(cfg.crossover_rate >= 0.0 && cfg.crossover_rate <= 1.0)) {
    throw ConfigError("crossover_rate must lie in [0,1]");
  }
  if (!(cfg.mutation_rate >= 0.0 && cfg.mutation_rate <= 1.0)) {
    throw ConfigError("mutation_rate must lie in [0,1]");
  }
  if (cfg.generations < 1) throw ConfigError("generations must be at least 1");
  if (cfg.runs < 1) throw ConfigError("runs must be at least 1");
  if (!(cfg.sigma_init > 0.0)) throw ConfigError("sigma_init must be positive");
  if (cfg.internal_cv_folds == 1) {
    throw ConfigError("internal_cv_folds must be 0 (off) or at least 2");
  }
}

EsConfig parse_config(const std::string& text, EsConfig base) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key=value, got '" + t + "'");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key == "mu") {
      base.mu = parse_number<std::size_t>(key, value);
    } else if (key == "lambda") {
      base.lambda = parse_number<std::size_t>(key, value);
    } else if (key == "crossover_rate") {
      base.crossover_rate = parse_number<double>(key, value);
    } else if (key == "mutation_rate") {
      base.mutation_rate = parse_number<double>(key, value);
    } else if (key == "generations") {
      base.generations = parse_number<std::size_t>(key, value);
    } else if (key == "kind") {
      auto k = parse_kind(value);
      if (!k) throw ConfigError("unknown hypothesis kind '" + value + "'");
      base.kind = *k;
    } else if (key == "T_runs" || key == "runs") {
      base.runs = parse_number<std::size_t>(key, value);
    } else if (key == "sigma_init") {
      base.sigma_init = parse_number<double>(key, value);
    } else if (key == "master_seed" || key == "seed") {
      base.master_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "internal_cv_folds") {
      base.internal_cv_folds = parse_number<std::size_t>(key, value);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return base;
}

std::size_t genome_length(HypothesisKind kind, std::size_t d) noexcept {
  return kind == HypothesisKind::linear ? d : 2 * d;
}

std::vector<Individual> init_population(const EsConfig& cfg, std::size_t d,
                                        std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> weight(-1.0, 1.0);
  std::uniform_real_distribution<double> center(0.0, 1.0);
  const std::size_t len = genome_length(cfg.kind, d);
  std::vector<Individual> pop(cfg.mu);
  for (auto& ind : pop) {
    ind.genome.resize(len);
    for (std::size_t i = 0; i < d; ++i) ind.genome[i] = weight(rng);
    for (std::size_t i = d; i < len; ++i) ind.genome[i] = center(rng);
    ind.sigma.assign(len, cfg.sigma_init);
  }
  return pop;
}

Individual mutate(const Individual& parent, const EsConfig& cfg, Rng& rng) {
  Individual child = parent;
  child.fitness.reset();
  if (!std::bernoulli_distribution(cfg.mutation_rate)(rng)) return child;

  const double len = static_cast<double>(child.genome.size());
  const double tau_global = 1.0 / std::sqrt(2.0 * len);
  const double tau_local = 1.0 / std::sqrt(2.0 * std::sqrt(len));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double shared = tau_global * normal(rng);
  for (std::size_t i = 0; i < child.genome.size(); ++i) {
    child.sigma[i] = std::max(
        kSigmaFloor, child.sigma[i] * std::exp(shared + tau_local * normal(rng)));
    child.genome[i] += child.sigma[i] * normal(rng);
  }
  return child;
}

Individual crossover(const Individual& p1, const Individual& p2,
                     const EsConfig& cfg, Rng& rng) {
  if (p1.genome.size() != p2.genome.size() ||
      p1.sigma.size() != p2.sigma.size()) {
    throw DimensionMismatch("crossover parents differ in genome length");
  }
  Individual child = p1;
  child.fitness.reset();
  if (!std::bernoulli_distribution(cfg.crossover_rate)(rng)) return child;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < child.genome.size(); ++i) {
    if (coin(rng)) {
      child.genome[i] = p2.genome[i];
      child.sigma[i] = p2.sigma[i];
    }
  }
  return child;
}

Hypothesis to_hypothesis(const Individual& ind, HypothesisKind kind,
                         std::size_t d) {
  if (ind.genome.size() != genome_length(kind, d)) {
    throw DimensionMismatch("genome length does not match hypothesis kind");
  }
  Hypothesis h;
  h.kind = kind;
  h.w.assign(ind.genome.begin(),
             ind.genome.begin() + static_cast<std::ptrdiff_t>(d));
  if (kind == HypothesisKind::weighted_l1) {
    h.c.assign(ind.genome.begin() + static_cast<std::ptrdiff_t>(d),
               ind.genome.end());
  }
  h.sigma = ind.sigma;
  return h;
}

EsRun run_es(const LabeledData& train, const EsConfig& cfg,
             std::uint64_t seed) {
  validate(cfg);
  const std::size_t d = train.dimension;
  if (d == 0) throw DimensionMismatch("training data has no features");
  Fitness fitness(train, cfg, derive_seed(seed, kFitnessStream));

  std::vector<Individual> parents =
      init_population(cfg, d, derive_seed(seed, kInitStream));
  for (auto& p : parents) p.fitness = fitness(p);

  auto by_fitness = [](const Individual& a, const Individual& b) {
    return *a.fitness > *b.fitness;
  };
  std::stable_sort(parents.begin(), parents.end(), by_fitness);

  EsRun run;
  run.best_per_generation.reserve(cfg.generations + 1);
  run.best_per_generation.push_back(*parents.front().fitness);

  std::vector<Individual> pool;
  pool.reserve(cfg.mu + cfg.lambda);
  for (std::size_t g = 1; g <= cfg.generations; ++g) {
    Rng rng(derive_seed(seed, g));
    std::uniform_int_distribution<std::size_t> pick(0, parents.size() - 1);
    pool.assign(parents.begin(), parents.end());
    for (std::size_t k = 0; k < cfg.lambda; ++k) {
      const auto& p1 = parents[pick(rng)];
      const auto& p2 = parents[pick(rng)];
      Individual child = mutate(crossover(p1, p2, cfg, rng), cfg, rng);
      child.fitness = fitness(child);
      pool.push_back(std::move(child));
    }
    // Stable: at equal fitness the earlier entry (a parent) survives.
    std::stable_sort(pool.begin(), pool.end(), by_fitness);
    pool.resize(cfg.mu);
    parents.swap(pool);
    run.best_per_generation.push_back(*parents.front().fitness);
  }

  run.hypothesis = to_hypothesis(parents.front(), cfg.kind, d);
  run.fitness = *parents.front().fitness;
  return run;
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t k) noexcept {
  return derive_seed(master_seed, 0x52554e /* "RUN" */, k);
}

EnsembleModel assemble_ensemble(std::vector<Hypothesis> hypotheses,
                                const LabeledData& train,
                                const FeatureMatrix& source) {
  if (hypotheses.empty()) throw EmptyInput("no hypotheses to combine");
  EnsembleModel model;
  model.members.reserve(hypotheses.size());
  for (auto& h : hypotheses) {
    auto normalizer = fit_normalizer(h, train);
    model.members.push_back({std::move(h), normalizer});
  }
  model.features = source.normalizer();
  model.columns = source.columns();
  return model;
}

EnsembleModel train_ensemble(const FeatureMatrix& train, const EsConfig& cfg,
                             std::size_t jobs) {
  validate(cfg);
  const LabeledData data = labeled_data(train);
  if (data.positives() == 0 || data.positives() == data.size()) {
    throw SingleClass("training data needs both classes");
  }
  std::vector<Hypothesis> hypotheses(cfg.runs);
  parallel_for(cfg.runs, jobs, [&](std::size_t k) {
    hypotheses[k] = run_es(data, cfg, run_seed(cfg.master_seed, k)).hypothesis;
  });
  return assemble_ensemble(std::move(hypotheses), data, train);
}

}  // namespace termrank
