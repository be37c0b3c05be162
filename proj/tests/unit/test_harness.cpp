#include <doctest.h>

#include <atomic>
#include <cmath>

#include "subshift/errors.hpp"
#include "subshift/power.hpp"
#include "subshift/results.hpp"
#include "subshift/rng.hpp"
#include "subshift/run_config.hpp"
#include "subshift/seed_plan.hpp"
#include "subshift/sweeps.hpp"

using namespace subshift;
using namespace subshift::harness;

namespace {

SampleSet constant_pool(std::size_t n, double value, std::uint64_t seed, const char* provenance) {
  Rng rng(seed);
  SampleSet set;
  set.dimension = 1;
  set.provenance = provenance;
  for (std::size_t i = 0; i < n; ++i) {
    Example ex;
    ex.features = FeatureVector::Constant(1, value + 1e-4 * rng.uniform());
    ex.origin = derive_seed(seed, {i});
    set.examples.push_back(std::move(ex));
  }
  return set;
}

nn::MlpParams identity_logit_net() {
  nn::MlpParams net = nn::MlpParams::zeros({1, 1});
  net.weights[0](0, 0) = 1.0;
  return net;
}

nn::MlpParams constant_logit_net() {
  nn::MlpParams net = nn::MlpParams::zeros({1, 1});
  net.biases[0][0] = 0.7;
  return net;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.methods = {Method::c2st};
  cfg.sample_sizes = {10};
  cfg.repetitions = 40;
  cfg.n_permutations = 60;
  return cfg;
}

}  // namespace

TEST_CASE("wilson intervals contain the rate and stay in [0,1]") {
  for (int n : {1, 10, 100, 400}) {
    for (int k = 0; k <= n; k += std::max(1, n / 7)) {
      const Interval ci = wilson_interval(k, n);
      const double rate = double(k) / n;
      CHECK(ci.lo >= 0.0);
      CHECK(ci.hi <= 1.0);
      CHECK(ci.lo <= rate + 1e-12);
      CHECK(ci.hi >= rate - 1e-12);
    }
  }
  const Interval degenerate = wilson_interval(0, 0);
  CHECK(degenerate.lo == 0.0);
  CHECK(degenerate.hi == 1.0);
}

TEST_CASE("binomial 99% bands match the frozen quantiles") {
  const Interval b400 = binomial_band(400, 0.05, 0.99);
  CHECK(b400.lo == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(b400.hi == doctest::Approx(0.08).epsilon(1e-12));

  const Interval b100 = binomial_band(100, 0.05, 0.99);
  CHECK(b100.lo == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(b100.hi == doctest::Approx(0.11).epsilon(1e-12));

  const Interval b500 = binomial_band(500, 0.05, 0.99);
  CHECK(b500.lo == doctest::Approx(0.026).epsilon(1e-12));
  CHECK(b500.hi == doctest::Approx(0.076).epsilon(1e-12));
}

TEST_CASE("parallel_for_jobs matches serial execution and propagates errors") {
  std::vector<std::size_t> serial(64), parallel(64);
  parallel_for_jobs(1, 64, [&](std::size_t j) { serial[j] = j * j; });
  parallel_for_jobs(4, 64, [&](std::size_t j) { parallel[j] = j * j; });
  CHECK(serial == parallel);

  CHECK_THROWS_AS(
      parallel_for_jobs(3, 16,
                        [&](std::size_t j) {
                          if (j == 7) throw DataError("boom");
                        }),
      DataError);
}

TEST_CASE("estimate_power: a forced separation rejects always, a constant net never") {
  // pool values keep every X draw strictly above every Y draw
  const SampleSet p_test = constant_pool(30, 1.0, 1, "P/test");
  const SampleSet q_test = constant_pool(30, -1.0, 2, "Q/test");

  TrainedArtifacts always;
  always.domain_net = identity_logit_net();
  const ExperimentConfig cfg = small_config();

  const PowerResult forced = estimate_power(cfg, always, p_test, q_test, 99);
  CHECK(forced.curve.at(Method::c2st, 10).rate == 1.0);

  TrainedArtifacts never;
  never.domain_net = constant_logit_net();
  const PowerResult flat = estimate_power(cfg, never, p_test, q_test, 99);
  CHECK(flat.curve.at(Method::c2st, 10).rate == 0.0);
}

TEST_CASE("estimate_power: single repetition yields a 0/1 rate") {
  const SampleSet p_test = constant_pool(20, 1.0, 3, "P/test");
  const SampleSet q_test = constant_pool(20, -1.0, 4, "Q/test");
  TrainedArtifacts art;
  art.domain_net = identity_logit_net();
  ExperimentConfig cfg = small_config();
  cfg.repetitions = 1;
  const PowerResult r = estimate_power(cfg, art, p_test, q_test, 5);
  const double rate = r.curve.at(Method::c2st, 10).rate;
  CHECK((rate == 0.0 || rate == 1.0));
}

TEST_CASE("estimate_type1 stays near alpha for a fixed net") {
  const SampleSet p_test = constant_pool(60, 0.0, 6, "P/test");
  TrainedArtifacts art;
  art.domain_net = identity_logit_net();
  ExperimentConfig cfg = small_config();
  cfg.repetitions = 80;
  const PowerResult r = estimate_type1(cfg, art, p_test, 7);
  const double rate = r.curve.at(Method::c2st, 10).rate;
  CHECK(rate <= binomial_band(cfg.repetitions, cfg.alpha, 0.999).hi);
}

TEST_CASE("fold hygiene: test pools overlapping training data are rejected") {
  const SampleSet p_test = constant_pool(10, 0.0, 8, "P/test");
  TrainedArtifacts art;
  art.domain_net = identity_logit_net();
  art.training_origins.insert(p_test.examples[3].origin);
  const ExperimentConfig cfg = small_config();
  CHECK_THROWS_AS((void)estimate_type1(cfg, art, p_test, 9), DataError);
}

TEST_CASE("missing artifacts are reported") {
  const SampleSet p_test = constant_pool(10, 0.0, 10, "P/test");
  TrainedArtifacts art;  // no nets at all
  const ExperimentConfig cfg = small_config();
  CHECK_THROWS_AS((void)estimate_type1(cfg, art, p_test, 11), MissingInputError);
}

TEST_CASE("serial and parallel protocols produce identical outcomes") {
  synth::PatternSpec pattern;
  pattern.side_length = 4;
  pattern.class_count = 3;
  synth::CorruptionSpec corruption;
  synth::ShiftScenario scenario;  // 0.5 -> 1.0
  const synth::ShiftPair pools =
      synth::build_shift_pair(scenario, pattern, corruption, {64, 32, 48}, 12);

  TrainedArtifacts art;
  art.task_net = nn::MlpParams::kaiming({16, 8, 3}, 13);
  art.domain_net = nn::MlpParams::kaiming({16, 8, 1}, 14);
  kernel::DeepKernelParams kp;
  kp.feature_net = nn::MlpParams::kaiming({16, 8, 4}, 15);
  kp.raw_sigma_a = 1.0;
  kp.raw_sigma_b = 1.0;
  art.kernel = kp;

  ExperimentConfig cfg;
  cfg.methods = {Method::c2st, Method::mmdd, Method::muks};
  cfg.sample_sizes = {5, 9};
  cfg.repetitions = 6;
  cfg.n_permutations = 40;

  cfg.threads = 1;
  const PowerResult serial = estimate_power(cfg, art, pools.p_test, pools.q_test, 16);
  cfg.threads = 4;
  const PowerResult parallel = estimate_power(cfg, art, pools.p_test, pools.q_test, 16);

  REQUIRE(serial.outcomes.size() == parallel.outcomes.size());
  for (std::size_t i = 0; i < serial.outcomes.size(); ++i) {
    CHECK(serial.outcomes[i].outcome.statistic == parallel.outcomes[i].outcome.statistic);
    CHECK(serial.outcomes[i].outcome.p_value == parallel.outcomes[i].outcome.p_value);
    CHECK(serial.outcomes[i].outcome.seed == parallel.outcomes[i].outcome.seed);
    CHECK(serial.outcomes[i].method == parallel.outcomes[i].method);
  }
}

TEST_CASE("train_artifacts trains only what the methods need") {
  synth::PatternSpec pattern;
  pattern.side_length = 4;
  pattern.class_count = 3;
  synth::CorruptionSpec corruption;
  synth::ShiftScenario scenario;
  const synth::ShiftPair pools =
      synth::build_shift_pair(scenario, pattern, corruption, {48, 24, 24}, 20);

  nn::TrainConfig classifier_cfg;
  classifier_cfg.max_epochs = 2;
  classifier_cfg.batch_size = 16;
  classifier_cfg.hidden_dims = {8};
  nn::TrainConfig kernel_cfg = classifier_cfg;

  ExperimentConfig cfg;
  cfg.methods = {Method::muks};
  cfg.sample_sizes = {5};
  cfg.repetitions = 2;

  const TrainedArtifacts art =
      train_artifacts(cfg, pools, classifier_cfg, kernel_cfg, 4, seed_plan::train_seeds(1));
  CHECK(art.task_net.has_value());
  CHECK_FALSE(art.domain_net.has_value());
  CHECK_FALSE(art.kernel.has_value());

  std::size_t expected = pools.p_train.size() + pools.p_val.size();
  CHECK(art.training_origins.size() == expected);
}

TEST_CASE("architecture sweep: identical variants give identical curves") {
  synth::PatternSpec pattern;
  pattern.side_length = 4;
  pattern.class_count = 2;
  synth::CorruptionSpec corruption;
  synth::ShiftScenario scenario;
  DataConfig data{pattern, corruption, {64, 32, 32}};

  nn::TrainConfig classifier_cfg;
  classifier_cfg.max_epochs = 2;
  classifier_cfg.batch_size = 16;
  classifier_cfg.hidden_dims = {8};
  nn::TrainConfig kernel_cfg = classifier_cfg;

  ExperimentConfig cfg;
  cfg.methods = {Method::c2st};
  cfg.sample_sizes = {6};
  cfg.repetitions = 4;
  cfg.n_permutations = 30;

  const std::vector<ArchitectureVariant> variants = {{"a", {8}}, {"b", {8}}};
  const auto entries = sweep_architecture(cfg, data, scenario, classifier_cfg, kernel_cfg, 4,
                                          variants, 77);
  REQUIRE(entries.size() == 2);
  REQUIRE(entries[0].power.outcomes.size() == entries[1].power.outcomes.size());
  for (std::size_t i = 0; i < entries[0].power.outcomes.size(); ++i) {
    CHECK(entries[0].power.outcomes[i].outcome.statistic ==
          entries[1].power.outcomes[i].outcome.statistic);
    CHECK(entries[0].power.outcomes[i].outcome.p_value ==
          entries[1].power.outcomes[i].outcome.p_value);
  }
}

TEST_CASE("training-size sweep: the identity fraction reproduces the base run") {
  synth::PatternSpec pattern;
  pattern.side_length = 4;
  pattern.class_count = 2;
  synth::CorruptionSpec corruption;
  synth::ShiftScenario scenario;
  DataConfig data{pattern, corruption, {96, 48, 48}};

  nn::TrainConfig classifier_cfg;
  classifier_cfg.max_epochs = 2;
  classifier_cfg.batch_size = 16;
  classifier_cfg.hidden_dims = {8};
  nn::TrainConfig kernel_cfg = classifier_cfg;

  ExperimentConfig cfg;
  cfg.methods = {Method::c2st};
  cfg.sample_sizes = {6};
  cfg.repetitions = 4;
  cfg.n_permutations = 30;

  const std::uint64_t root = 88;
  const auto entries = sweep_training_size(cfg, data, scenario, classifier_cfg, kernel_cfg, 4,
                                           std::vector<double>{1.0}, root);
  REQUIRE(entries.size() == 1);

  const auto pools = synth::build_shift_pair(scenario, pattern, corruption, data.sizes,
                                             derive_seed(root, {seed_plan::kData}));
  const TrainedArtifacts art =
      train_artifacts(cfg, pools, classifier_cfg, kernel_cfg, 4, seed_plan::train_seeds(root));
  const PowerResult base = estimate_power(cfg, art, pools.p_test, pools.q_test, root);

  REQUIRE(entries[0].power.outcomes.size() == base.outcomes.size());
  for (std::size_t i = 0; i < base.outcomes.size(); ++i) {
    CHECK(entries[0].power.outcomes[i].outcome.statistic == base.outcomes[i].outcome.statistic);
    CHECK(entries[0].power.outcomes[i].outcome.p_value == base.outcomes[i].outcome.p_value);
  }
}

TEST_CASE("sweeps validate their inputs") {
  synth::PatternSpec pattern;
  pattern.side_length = 4;
  synth::CorruptionSpec corruption;
  synth::ShiftScenario scenario;
  DataConfig data{pattern, corruption, {48, 24, 24}};
  nn::TrainConfig tc;
  tc.batch_size = 16;
  ExperimentConfig cfg = small_config();

  CHECK_THROWS_AS((void)sweep_shift_strength(cfg, data, tc, tc, 4, 0.5,
                                             std::vector<double>{0.5}, 1),
                  ConfigError);
  CHECK_THROWS_AS((void)sweep_training_size(cfg, data, scenario, tc, tc, 4,
                                            std::vector<double>{1.5}, 1),
                  ConfigError);
  // 48 examples cannot cover two minibatches of 64
  nn::TrainConfig big = tc;
  big.batch_size = 64;
  CHECK_THROWS_AS((void)sweep_training_size(cfg, data, scenario, big, big, 4,
                                            std::vector<double>{0.9}, 1),
                  DataError);
}

TEST_CASE("run config: defaults, strict keys, round trip") {
  using nlohmann::json;
  const json minimal = json::object();
  const cli::RunConfig defaults = cli::RunConfig::from_json(minimal);
  CHECK(defaults.experiment.sample_sizes == std::vector<std::size_t>{10, 30, 50, 100, 200, 500});
  CHECK(defaults.experiment.repetitions == 100);
  CHECK(defaults.training.lr == 1e-3);
  CHECK(defaults.kernel_training.lr == 1e-4);

  const json tweaked = {
      {"root_seed", 7},
      {"experiment", {{"methods", {"c2st"}}, {"sample_sizes", {5, 10}}, {"repetitions", 3}}},
      {"training", {{"hidden_dims", {32}}}},
  };
  const cli::RunConfig cfg = cli::RunConfig::from_json(tweaked);
  CHECK(cfg.root_seed == 7);
  CHECK(cfg.experiment.methods == std::vector<Method>{Method::c2st});
  CHECK(cfg.training.hidden_dims == std::vector<Eigen::Index>{32});

  CHECK_THROWS_AS((void)cli::RunConfig::from_json(json{{"unknown_key", 1}}), ConfigError);
  CHECK_THROWS_AS((void)cli::RunConfig::from_json(json{{"experiment", {{"reps", 3}}}}),
                  ConfigError);
  CHECK_THROWS_AS(
      (void)cli::RunConfig::from_json(json{{"data", {{"pattern", {{"side", 8}}}}}}),
      ConfigError);

  const cli::RunConfig round = cli::RunConfig::from_json(cfg.to_json());
  CHECK(round.to_json() == cfg.to_json());
}

TEST_CASE("summary json, csv and svg agree with the curve") {
  PowerResult result;
  for (std::size_t m : {10, 50}) {
    for (Method method : {Method::c2st, Method::muks}) {
      PowerPoint pt;
      pt.method = method;
      pt.m = m;
      pt.repetitions = 20;
      pt.rejected = method == Method::c2st ? 15 : 3;
      pt.rate = double(pt.rejected) / 20.0;
      pt.ci = wilson_interval(pt.rejected, 20);
      result.curve.points.push_back(pt);
    }
  }
  const std::vector<cli::LabeledResult> blocks = {{"power", result}};
  const nlohmann::json summary = cli::summary_to_json(blocks, 0.05);
  CHECK(summary["alpha"] == 0.05);
  REQUIRE(summary["curves"].contains("power"));
  CHECK(summary["curves"]["power"].size() == 4);
  CHECK(summary["curves"]["power"][0]["rate"] == 0.75);

  const std::string svg = cli::render_curve_svg(result.curve, "power");
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find(">10<") != std::string::npos);  // m-grid labels on the axis
  CHECK(svg.find(">50<") != std::string::npos);
  CHECK(svg.find("c2st") != std::string::npos);
  CHECK(svg.find("muks") != std::string::npos);

  const std::string bars = cli::render_type1_svg(result.curve, 0.05, "type1");
  CHECK(bars.find("<rect") != std::string::npos);
  CHECK(bars.find("alpha") != std::string::npos);
}
