#include <doctest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "termrank/error.hpp"
#include "termrank/feature_matrix.hpp"

using namespace termrank;

namespace {

Candidate row(std::string id, std::vector<double> raw) {
  return Candidate{std::move(id), std::move(raw), {}, std::nullopt};
}

}  // namespace

TEST_CASE("minmax endpoints map to 0 and 1") {
  const auto m = FeatureMatrix::fit({"MI"}, {row("a", {1.0}), row("b", {3.0})},
                                    NormalizationMode::minmax);
  CHECK(m.candidates()[0].features[0] == 0.0);
  CHECK(m.candidates()[1].features[0] == 1.0);
}

TEST_CASE("constant column normalizes to one half in both modes") {
  for (auto mode : {NormalizationMode::minmax, NormalizationMode::rank}) {
    const auto m = FeatureMatrix::fit(
        {"x"}, {row("a", {2.0}), row("b", {2.0}), row("c", {2.0})}, mode);
    for (const auto& c : m.candidates()) CHECK(c.features[0] == 0.5);
  }
}

TEST_CASE("OccL column is rank-encoded from best to worst") {
  // Three tables with distinct occurrence counts.
  const std::vector<CountedCandidate> cands = {
      {"top", contingency(9, 20, 20, 100), std::nullopt},
      {"mid", contingency(5, 20, 20, 100), std::nullopt},
      {"low", contingency(1, 20, 20, 100), std::nullopt},
  };
  for (auto mode : {NormalizationMode::minmax, NormalizationMode::rank}) {
    const auto m = build_feature_matrix(cands, mode);
    const std::size_t j = index_of(MeasureId::OccL);
    CHECK(m.normalizer().columns()[j].kind == ScalingKind::rank);
    CHECK(m.candidates()[0].features[j] == 1.0);
    CHECK(m.candidates()[1].features[j] == 0.5);
    CHECK(m.candidates()[2].features[j] == 0.0);
  }
}

TEST_CASE("build_feature_matrix needs two candidates") {
  std::vector<CountedCandidate> none;
  CHECK_THROWS_AS(build_feature_matrix(none, NormalizationMode::minmax),
                  EmptyInput);
  std::vector<CountedCandidate> one = {
      {"a", contingency(1, 1, 1, 2), std::nullopt}};
  CHECK_THROWS_AS(build_feature_matrix(one, NormalizationMode::minmax),
                  DegenerateDataset);
}

TEST_CASE("unseen values are clamped into [0,1]") {
  for (auto kind : {ScalingKind::minmax, ScalingKind::rank}) {
    const std::vector<double> train = {1.0, 2.0, 4.0};
    const auto s = ColumnScaling::fit(train, kind);
    CHECK(s.apply(-10.0) == 0.0);
    CHECK(s.apply(10.0) == 1.0);
    const double between = s.apply(3.0);
    CHECK(between > s.apply(2.0));
    CHECK(between < s.apply(4.0));
  }
}

TEST_CASE("normalization preserves the raw order of every column") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> value(0, 30);
  for (auto mode : {NormalizationMode::minmax, NormalizationMode::rank}) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Candidate> rows;
      for (int i = 0; i < 40; ++i) {
        rows.push_back(row("c" + std::to_string(i),
                           {value(rng) * 0.5, value(rng) - 10.0}));
      }
      const auto m = FeatureMatrix::fit({"a", "b"}, rows, mode);
      for (std::size_t j = 0; j < 2; ++j) {
        for (const auto& p : m.candidates()) {
          CHECK(p.features[j] >= 0.0);
          CHECK(p.features[j] <= 1.0);
          for (const auto& q : m.candidates()) {
            if (p.raw[j] < q.raw[j]) CHECK(p.features[j] < q.features[j]);
            if (p.raw[j] == q.raw[j]) CHECK(p.features[j] == q.features[j]);
          }
        }
      }
    }
  }
}

TEST_CASE("project_subset applies the training scaling to held-out rows") {
  std::vector<Candidate> rows;
  for (int i = 0; i < 10; ++i) rows.push_back(row(std::to_string(i), {double(i)}));
  const auto all = FeatureMatrix::fit({"x"}, rows, NormalizationMode::minmax);
  const std::vector<std::size_t> train = {0, 1, 2, 3, 4};
  const std::vector<std::size_t> test = {5, 9};
  const auto fitted = all.refit_subset(train, NormalizationMode::minmax);
  const auto held_out = all.project_subset(test, fitted.normalizer());
  CHECK(fitted.candidates()[4].features[0] == 1.0);
  // Values beyond the training range clamp rather than extrapolate.
  CHECK(held_out.candidates()[0].features[0] == 1.0);
  CHECK(held_out.candidates()[1].features[0] == 1.0);
}

TEST_CASE("labeled_data refuses unlabeled candidates") {
  const auto m = FeatureMatrix::fit({"x"}, {row("a", {0.0}), row("b", {1.0})},
                                    NormalizationMode::minmax);
  CHECK_FALSE(m.fully_labeled());
  CHECK_THROWS_AS(labeled_data(m), SchemaError);
}
