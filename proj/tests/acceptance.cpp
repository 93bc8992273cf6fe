// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "support.hpp"
#include "termrank/cli.hpp"
#include "termrank/corpus.hpp"
#include "termrank/evolve.hpp"
#include "termrank/io.hpp"
#include "termrank/measures.hpp"
#include "termrank/protocol.hpp"
#include "termrank/rocauc.hpp"

using namespace termrank;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

std::size_t worker_count() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Same 500 instances for the AUC and ROC criteria: sizes 2..200, scores on
// a coarse grid so ties occur, both classes forced.
std::vector<termrank::testing::ScoredSample> score_sets() {
  std::mt19937_64 rng(500);
  std::uniform_int_distribution<std::size_t> size(2, 200);
  std::vector<termrank::testing::ScoredSample> sets;
  for (int i = 0; i < 500; ++i) {
    sets.push_back(termrank::testing::random_scored_sample(rng, size(rng)));
  }
  return sets;
}

Outcome auc_oracle() {
  const auto sets = score_sets();
  const auto start = Clock::now();
  double worst = 0.0;
  for (const auto& s : sets) {
    worst = std::max(worst, std::abs(auc(s.scores, s.labels) -
                                     termrank::testing::brute_force_auc(
                                         s.scores, s.labels)));
  }
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = worst < 1e-12 && secs < 5.0;
  o.detail = "500 sets, max |diff| " + fmt("%.3g", worst) + ", " +
             fmt("%.3f s", secs);
  return o;
}

Outcome roc_consistency() {
  double worst = 0.0;
  std::size_t bad_shape = 0;
  for (const auto& s : score_sets()) {
    const auto curve = roc_points(s.scores, s.labels);
    const auto& p = curve.points;
    worst = std::max(worst, std::abs(trapezoid_area(p) - auc(s.scores, s.labels)));
    bool ok = p.front() == RocPoint{0, 0} && p.back() == RocPoint{1, 1};
    for (std::size_t i = 1; i < p.size(); ++i) {
      ok = ok && p[i].fpr >= p[i - 1].fpr && p[i].tpr >= p[i - 1].tpr;
    }
    if (!ok) ++bad_shape;
  }
  Outcome o;
  o.pass = worst <= 1e-9 && bad_shape == 0;
  o.detail = "max |area - auc| " + fmt("%.3g", worst) + ", " +
             std::to_string(bad_shape) + " malformed curves";
  return o;
}

Outcome measure_table() {
  struct Row {
    MeasureId id;
    double expected;
    double tol;
  };
  // Derived constants for t = (10, 20, 25, 100).
  const Row rows[] = {
      {MeasureId::MI, 1.0, 1e-9},          {MeasureId::Dice, 4.0 / 9.0, 1e-9},
      {MeasureId::Conv, 1.5, 1e-9},        {MeasureId::LC, 0.0, 1e-9},
      {MeasureId::Khi2, 25.0 / 3.0, 1e-9}, {MeasureId::CM, 3.0, 1e-9},
      {MeasureId::Ass, 0.2, 1e-9},         {MeasureId::Ttest, 1.5811, 1e-3},
      {MeasureId::MI3, 7.6439, 1e-3},      {MeasureId::L, 7.5288, 1e-3},
      {MeasureId::J, 0.0415, 1e-3},        {MeasureId::SeSc, 1.0, 1e-9},
  };
  const auto t = contingency(10, 20, 25, 100);
  Outcome o;
  std::string misses;
  for (const auto& r : rows) {
    const double v = compute_measure(r.id, t);
    if (!(std::abs(v - r.expected) <= r.tol)) {
      o.pass = false;
      misses += " " + std::string(measure_name(r.id)) + "=" + fmt("%.6g", v);
    }
  }
  o.detail = o.pass ? "12 measures within tolerance" : "mismatch:" + misses;
  return o;
}

Outcome elitism() {
  const auto start = Clock::now();
  EsConfig cfg;
  cfg.generations = 20;
  std::size_t violations = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto data = labeled_data(termrank::testing::planted_signal(seed, 100, 0.1));
    const auto run = run_es(data, cfg, seed);
    const auto& best = run.best_per_generation;
    for (std::size_t g = 1; g < best.size(); ++g) {
      if (best[g] < best[g - 1]) ++violations;
    }
    if (best.size() != 21 || run.fitness != best.back()) ++violations;
  }
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = violations == 0 && secs < 30.0;
  o.detail = "100 runs x 20 generations, " + std::to_string(violations) +
             " violations, " + fmt("%.1f s", secs);
  return o;
}

ExperimentReport planted_experiment(bool randomize_labels) {
  const auto data = termrank::testing::planted_signal(2024, 1000, 0.1,
                                                      randomize_labels);
  EsConfig cfg;  // defaults: mu 20, lambda 100, 21 runs, 100 generations
  cfg.master_seed = 7;
  ExperimentOptions opt;
  opt.folds = 5;
  opt.repetitions = 3;
  opt.jobs = worker_count();
  return run_experiment(data, cfg, opt);
}

Outcome planted_signal() {
  const auto start = Clock::now();
  const auto report = planted_experiment(false);
  const double secs = seconds_since(start);
  const double ensemble = report.summary.front().mean;
  double best = 0.0;
  std::string best_name;
  for (std::size_t m = 1; m < report.methods.size(); ++m) {
    if (report.summary[m].mean > best) {
      best = report.summary[m].mean;
      best_name = report.methods[m];
    }
  }
  Outcome o;
  o.pass = ensemble >= 0.85 && ensemble - best >= 0.03;
  o.detail = "ensemble " + fmt("%.4f", ensemble) + ", best standalone " +
             best_name + " " + fmt("%.4f", best) + ", " + fmt("%.1f s", secs) +
             " on " + std::to_string(worker_count()) + " threads";
  return o;
}

Outcome null_experiment() {
  const auto report = planted_experiment(true);
  double lo = 1.0, hi = 0.0;
  for (const auto& s : report.summary) {
    lo = std::min(lo, s.mean);
    hi = std::max(hi, s.mean);
  }
  Outcome o;
  o.pass = lo >= 0.45 && hi <= 0.55;
  o.detail = "14 method means in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "]";
  return o;
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "termrank_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  save_features(termrank::testing::planted_signal(5, 300, 0.1), dir / "features.tsv");

  auto run = [&](const std::string& jobs, const std::string& out) {
    std::ostringstream o, e;
    const int code = run_cli({"experiment", (dir / "features.tsv").string(),
                              "--folds", "5", "--repetitions", "2", "--runs", "7",
                              "--generations", "15", "--seed", "123", "--jobs",
                              jobs, "--out-dir", (dir / out).string()},
                             o, e);
    return std::make_pair(code, o.str());
  };
  const auto a = run("1", "jobs1");
  const auto b = run("8", "jobs8");
  Outcome o;
  std::size_t files = 0, differing = 0;
  if (a.first != 0 || b.first != 0) {
    o.pass = false;
    o.detail = "experiment exited with " + std::to_string(a.first) + "/" +
               std::to_string(b.first);
  } else {
    for (const auto& entry : fs::recursive_directory_iterator(dir / "jobs1")) {
      if (!entry.is_regular_file()) continue;
      ++files;
      const auto other = dir / "jobs8" / fs::relative(entry.path(), dir / "jobs1");
      if (!fs::exists(other) || read_file(entry.path()) != read_file(other)) {
        ++differing;
      }
    }
    std::size_t other_files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dir / "jobs8")) {
      if (entry.is_regular_file()) ++other_files;
    }
    o.pass = differing == 0 && files == other_files && files > 0 &&
             a.second == b.second;
    o.detail = std::to_string(files) + " report files, " +
               std::to_string(differing) + " differ between --jobs 1 and 8";
  }
  fs::remove_all(dir);
  return o;
}

std::vector<std::size_t> descending_order(const std::vector<double>& s) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  return idx;
}

Outcome ensemble_properties() {
  std::size_t permutation_failures = 0;
  std::size_t ranking_failures = 0;
  EsConfig cfg;
  cfg.mu = 6;
  cfg.lambda = 24;
  cfg.generations = 5;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t d = 2 + seed % 6;
    const auto m = termrank::testing::random_matrix(
        rng, 40 + seed % 30, d, [&](const std::vector<double>& x) {
          return x[0] + 0.5 * x[d - 1] > 0.75;
        });
    cfg.master_seed = seed;
    cfg.kind = seed % 2 ? HypothesisKind::linear : HypothesisKind::weighted_l1;

    cfg.runs = 7;
    const auto model = train_ensemble(m, cfg);
    auto shuffled = model;
    std::shuffle(shuffled.members.begin(), shuffled.members.end(), rng);
    if (ensemble_scores(shuffled, m) != ensemble_scores(model, m)) {
      ++permutation_failures;
    }

    cfg.runs = 1;
    const auto single = train_ensemble(m, cfg);
    std::vector<double> member;
    for (const auto& c : m.candidates()) {
      member.push_back(score(single.members[0].hypothesis, c.features));
    }
    if (descending_order(ensemble_scores(single, m)) != descending_order(member)) {
      ++ranking_failures;
    }
  }
  Outcome o;
  o.pass = permutation_failures == 0 && ranking_failures == 0;
  o.detail = "100 datasets, " + std::to_string(permutation_failures) +
             " permutation and " + std::to_string(ranking_failures) +
             " T=1 ranking mismatches";
  return o;
}

Outcome stratification() {
  std::mt19937_64 rng(9);
  std::size_t violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2 * k, 2000)(rng);
    const double ratio = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
    std::size_t pos = static_cast<std::size_t>(std::lround(ratio * double(n)));
    pos = std::clamp(pos, k, n - k);
    std::vector<Label> y(pos, Label::positive);
    y.resize(n, Label::negative);
    std::shuffle(y.begin(), y.end(), rng);

    const auto plan = stratified_folds(y, k, rng());
    std::size_t min_size = n, max_size = 0;
    for (std::size_t f = 0; f < k; ++f) {
      const auto test = plan.test_rows(f);
      min_size = std::min(min_size, test.size());
      max_size = std::max(max_size, test.size());
      const double fold_pos = static_cast<double>(std::count_if(
          test.begin(), test.end(), [&](std::size_t i) { return is_positive(y[i]); }));
      if (std::abs(fold_pos - double(pos) / double(k)) > 1.0) ++violations;
    }
    if (max_size - min_size > 1) ++violations;
  }
  Outcome o;
  o.pass = violations == 0;
  o.detail = "200 (n, ratio, k) triples, " + std::to_string(violations) + " violations";
  return o;
}

Outcome extraction_margins() {
  std::mt19937_64 rng(10);
  std::size_t checked = 0, violations = 0;
  const TagPattern patterns[] = {{"NOUN", "NOUN"}, {"NOUN", "ADJ"}};
  while (checked < 100) {
    const auto corpus = termrank::testing::random_corpus(rng);
    const auto& pattern = patterns[checked % 2];
    const auto truth =
        termrank::testing::brute_force_recount(corpus, pattern.first, pattern.second);
    if (truth.total == 0) continue;
    ++checked;
    const auto set = extract_candidates(corpus, pattern, 1);
    Count sum = 0;
    std::map<std::string, Count> first_sum, second_sum;
    for (const auto& e : set.entries) {
      sum += e.table.n11();
      first_sum[e.first] += e.table.n11();
      second_sum[e.second] += e.table.n11();
      const auto it = truth.n11.find({e.first, e.second});
      if (it == truth.n11.end() || it->second != e.table.n11()) ++violations;
      if (e.table.n_total() != truth.total) ++violations;
    }
    if (sum != set.n_total || set.n_total != truth.total) ++violations;
    if (set.entries.size() != truth.n11.size()) ++violations;
    for (const auto& e : set.entries) {
      if (e.table.n_x() != first_sum[e.first] ||
          e.table.n_x() != truth.first.at(e.first)) ++violations;
      if (e.table.n_y() != second_sum[e.second] ||
          e.table.n_y() != truth.second.at(e.second)) ++violations;
    }
  }
  Outcome o;
  o.pass = violations == 0;
  o.detail = "100 corpora, " + std::to_string(violations) + " violations";
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"AUC oracle equivalence", auc_oracle},
      {"ROC consistency", roc_consistency},
      {"measure hand-check table", measure_table},
      {"elitism", elitism},
      {"planted-signal experiment", planted_signal},
      {"null experiment", null_experiment},
      {"determinism across --jobs", determinism},
      {"ensemble properties", ensemble_properties},
      {"stratification", stratification},
      {"extraction margins", extraction_margins},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", index, name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
