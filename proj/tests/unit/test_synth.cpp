#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "subshift/errors.hpp"
#include "subshift/synth.hpp"

using namespace subshift;
using namespace subshift::synth;

namespace {

double tagged_fraction(const SampleSet& set) {
  std::size_t tagged = 0;
  for (const Example& ex : set.examples) tagged += (ex.subgroup_tag == 1);
  return double(tagged) / double(set.size());
}

}  // namespace

TEST_CASE("prototypes are binary-ish, per-class and deterministic") {
  PatternSpec pattern;
  const auto protos = build_prototypes(pattern);
  REQUIRE(protos.size() == 10);
  for (const auto& p : protos) {
    REQUIRE(p.size() == 256);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      CHECK((p[i] == 0.1 || p[i] == 0.9));
    }
  }
  // distinct classes get distinct patterns
  for (std::size_t a = 0; a < protos.size(); ++a) {
    for (std::size_t b = a + 1; b < protos.size(); ++b) {
      CHECK((protos[a] - protos[b]).cwiseAbs().sum() > 0.0);
    }
  }
  const auto again = build_prototypes(pattern);
  for (std::size_t c = 0; c < protos.size(); ++c) CHECK(protos[c] == again[c]);
}

TEST_CASE("generate_dataset: corruption probability endpoints") {
  PatternSpec pattern;
  CorruptionSpec corruption;

  corruption.probability = 0.0;
  const SampleSet clean = generate_dataset(200, pattern, corruption, 1);
  CHECK(tagged_fraction(clean) == 0.0);

  corruption.probability = 1.0;
  const SampleSet dirty = generate_dataset(200, pattern, corruption, 2);
  CHECK(tagged_fraction(dirty) == 1.0);
}

TEST_CASE("generate_dataset: corrupted fraction within the binomial bound") {
  PatternSpec pattern;
  pattern.side_length = 8;  // smaller images keep this test quick
  CorruptionSpec corruption;
  corruption.probability = 0.5;
  const SampleSet set = generate_dataset(10000, pattern, corruption, 3);
  const double frac = tagged_fraction(set);
  CHECK(std::abs(frac - 0.5) < 5.0 * std::sqrt(0.25 / 10000.0));
}

TEST_CASE("generate_dataset: values clamped, labels valid, deterministic") {
  PatternSpec pattern;
  pattern.side_length = 8;
  CorruptionSpec corruption;
  const SampleSet a = generate_dataset(500, pattern, corruption, 4);
  const SampleSet b = generate_dataset(500, pattern, corruption, 4);
  std::map<int, int> label_counts;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Example& ex = a.examples[i];
    REQUIRE(ex.class_label >= 0);
    REQUIRE(ex.class_label < pattern.class_count);
    label_counts[ex.class_label]++;
    CHECK(ex.features.minCoeff() >= 0.0);
    CHECK(ex.features.maxCoeff() <= 1.0);
    CHECK(ex.features == b.examples[i].features);
    CHECK(ex.origin == b.examples[i].origin);
  }
  CHECK(label_counts.size() == 10);  // every class shows up in 500 draws
}

TEST_CASE("apply_occlusion: full-image occlusion zeroes everything") {
  CorruptionSpec spec;
  spec.rect_min_frac = 1.0;
  spec.rect_max_frac = 1.0;
  spec.fill_value = 0.0;
  const FeatureVector img = FeatureVector::Constant(64, 0.5);
  const FeatureVector out = apply_occlusion(img, spec, 7);
  CHECK(out.size() == img.size());
  CHECK(out.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("apply_occlusion: fill equal to the image value is a no-op") {
  CorruptionSpec spec;
  spec.fill_value = 0.7;
  const FeatureVector img = FeatureVector::Constant(256, 0.7);
  const FeatureVector out = apply_occlusion(img, spec, 8);
  CHECK(out == img);
}

TEST_CASE("apply_occlusion: seeded 8x8 rectangle flips exactly 64 pixels") {
  CorruptionSpec spec;
  spec.rect_min_frac = 0.5;
  spec.rect_max_frac = 0.5;
  spec.fill_value = 0.0;
  const FeatureVector img = FeatureVector::Constant(256, 0.7);  // 16x16
  const FeatureVector out = apply_occlusion(img, spec, 9);
  int filled = 0, untouched = 0;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] == 0.0) ++filled;
    if (out[i] == 0.7) ++untouched;
  }
  CHECK(filled == 64);
  CHECK(untouched == 192);
}

TEST_CASE("apply_occlusion rejects non-square dimensions") {
  CorruptionSpec spec;
  const FeatureVector img = FeatureVector::Constant(10, 0.5);
  CHECK_THROWS_AS((void)apply_occlusion(img, spec, 1), ShapeError);
}

TEST_CASE("scenario validation: one mechanism at a time") {
  ShiftScenario both;
  both.source_p = 0.5;
  both.target_p = 1.0;
  both.oversample_w = 5.0;
  CHECK_THROWS_AS(both.validate(), ConfigError);

  ShiftScenario null_scenario;
  null_scenario.source_p = 0.5;
  null_scenario.target_p = 0.5;
  null_scenario.oversample_w = 1.0;
  CHECK(null_scenario.is_null());
  null_scenario.validate();
}

TEST_CASE("build_shift_pair: full corruption shift makes Q all-corrupted") {
  PatternSpec pattern;
  pattern.side_length = 8;
  CorruptionSpec corruption;
  ShiftScenario scenario;  // 0.5 -> 1.0
  const ShiftPair pair = build_shift_pair(scenario, pattern, corruption, {200, 50, 50}, 11);
  CHECK(tagged_fraction(pair.q_train) == 1.0);
  CHECK(tagged_fraction(pair.q_val) == 1.0);
  CHECK(tagged_fraction(pair.q_test) == 1.0);
  CHECK(tagged_fraction(pair.p_train) < 1.0);
  CHECK(pair.p_train.provenance == "P/train");
  CHECK(pair.q_test.provenance == "Q/test");

  // independent draws: origins never repeat across pools
  std::set<std::uint64_t> origins;
  std::size_t total = 0;
  for (const auto* s : {&pair.p_train, &pair.p_val, &pair.p_test, &pair.q_train, &pair.q_val,
                        &pair.q_test}) {
    for (const Example& ex : s->examples) origins.insert(ex.origin);
    total += s->size();
  }
  CHECK(origins.size() == total);
}

TEST_CASE("oversample_subgroup: prevalence follows w q / (w q + 1 - q)") {
  PatternSpec pattern;
  pattern.side_length = 8;
  CorruptionSpec corruption;
  corruption.probability = 0.5;
  const SampleSet pool = generate_dataset(10000, pattern, corruption, 12);
  const double q = tagged_fraction(pool);

  for (const double w : {5.0, 10.0}) {
    const SampleSet shifted = oversample_subgroup(pool, w, 13);
    CHECK(shifted.size() == pool.size());
    const double expected = w * q / (w * q + (1.0 - q));
    const double bound = 5.0 * std::sqrt(expected * (1.0 - expected) / double(pool.size()));
    CHECK(std::abs(tagged_fraction(shifted) - expected) < bound);
  }
}

TEST_CASE("oversample_subgroup: w=1 is a uniform resample") {
  PatternSpec pattern;
  pattern.side_length = 8;
  CorruptionSpec corruption;
  corruption.probability = 0.3;
  const SampleSet pool = generate_dataset(8000, pattern, corruption, 14);
  const double q = tagged_fraction(pool);
  const SampleSet resampled = oversample_subgroup(pool, 1.0, 15);
  const double bound = 5.0 * std::sqrt(q * (1.0 - q) / double(pool.size()));
  CHECK(std::abs(tagged_fraction(resampled) - q) < bound);
}

TEST_CASE("oversample_subgroup: limits and errors") {
  PatternSpec pattern;
  pattern.side_length = 8;
  CorruptionSpec corruption;
  corruption.probability = 0.5;
  const SampleSet pool = generate_dataset(500, pattern, corruption, 16);

  const SampleSet extreme = oversample_subgroup(pool, 1e6, 17);
  CHECK(tagged_fraction(extreme) > 0.99);

  CHECK_THROWS_AS((void)oversample_subgroup(pool, 0.5, 1), ConfigError);

  corruption.probability = 0.0;
  const SampleSet single_tag = generate_dataset(100, pattern, corruption, 18);
  CHECK_THROWS_AS((void)oversample_subgroup(single_tag, 2.0, 1), DataError);
}

TEST_CASE("build_shift_pair with oversampling matches the prevalence formula") {
  PatternSpec pattern;
  pattern.side_length = 8;
  CorruptionSpec corruption;
  corruption.probability = 0.5;
  ShiftScenario scenario;
  scenario.source_p = 0.5;
  scenario.target_p = 0.5;
  scenario.oversample_w = 5.0;
  const ShiftPair pair = build_shift_pair(scenario, pattern, corruption, {10000, 100, 100}, 19);
  const double expected = 5.0 * 0.5 / (5.0 * 0.5 + 0.5);  // 5/6
  const double bound = 5.0 * std::sqrt(expected * (1.0 - expected) / 10000.0);
  CHECK(std::abs(tagged_fraction(pair.q_train) - expected) < bound);
}
