#include "subshift/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "subshift/errors.hpp"
#include "subshift/rng.hpp"
#include "subshift/seed_plan.hpp"

namespace subshift::harness {

namespace {

SampleSet subsample_fraction(const SampleSet& pool, double fraction, std::uint64_t seed) {
  if (fraction == 1.0) return pool;
  const auto keep = static_cast<std::size_t>(std::floor(fraction * double(pool.size())));
  if (keep < 1) throw DataError("subsample: fraction leaves no examples");
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  SampleSet out;
  out.dimension = pool.dimension;
  out.class_count = pool.class_count;
  out.provenance = pool.provenance;
  out.examples.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.examples.push_back(pool.examples[order[i]]);
  return out;
}

std::string format_value(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

std::vector<SweepEntry> sweep_shift_strength(const ExperimentConfig& cfg, const DataConfig& data,
                                             const nn::TrainConfig& classifier_cfg,
                                             const nn::TrainConfig& kernel_cfg,
                                             Eigen::Index feature_dim, double source_p,
                                             std::span<const double> w_values,
                                             std::uint64_t root_seed) {
  cfg.validate();
  for (double w : w_values) {
    if (w < 1.0) throw ConfigError("sweep_shift_strength: w must be >= 1");
  }

  // Base population and training seeds are shared with the plain power run,
  // so a sweep entry at the base w reproduces it exactly.
  const std::uint64_t data_seed = derive_seed(root_seed, {seed_plan::kData});
  std::vector<SweepEntry> out;
  for (double w : w_values) {
    synth::ShiftScenario scenario;
    scenario.source_p = source_p;
    scenario.target_p = source_p;
    scenario.oversample_w = w;

    const synth::ShiftPair pools =
        synth::build_shift_pair(scenario, data.pattern, data.corruption, data.sizes, data_seed);
    const TrainedArtifacts artifacts = train_artifacts(
        cfg, pools, classifier_cfg, kernel_cfg, feature_dim, seed_plan::train_seeds(root_seed));

    SweepEntry entry;
    entry.label = "w=" + format_value(w);
    entry.value = w;
    entry.power = estimate_power(cfg, artifacts, pools.p_test, pools.q_test, root_seed);
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<SweepEntry> sweep_training_size(const ExperimentConfig& cfg, const DataConfig& data,
                                            const synth::ShiftScenario& scenario,
                                            const nn::TrainConfig& classifier_cfg,
                                            const nn::TrainConfig& kernel_cfg,
                                            Eigen::Index feature_dim,
                                            std::span<const double> fractions,
                                            std::uint64_t root_seed) {
  cfg.validate();
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("sweep_training_size: fractions must lie in (0,1]");
  }

  const std::uint64_t data_seed = derive_seed(root_seed, {seed_plan::kData});
  const synth::ShiftPair base =
      synth::build_shift_pair(scenario, data.pattern, data.corruption, data.sizes, data_seed);

  std::vector<SweepEntry> out;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double f = fractions[i];
    synth::ShiftPair pools = base;
    pools.p_train =
        subsample_fraction(base.p_train, f, derive_seed(root_seed, {seed_plan::kSubsample, i, 0}));
    pools.q_train =
        subsample_fraction(base.q_train, f, derive_seed(root_seed, {seed_plan::kSubsample, i, 1}));

    const auto min_needed = static_cast<std::size_t>(2 * classifier_cfg.batch_size);
    if (pools.p_train.size() < min_needed || pools.q_train.size() < min_needed) {
      throw DataError("sweep_training_size: fraction " + format_value(f) +
                      " leaves fewer than two minibatches of training data");
    }

    const TrainedArtifacts artifacts = train_artifacts(
        cfg, pools, classifier_cfg, kernel_cfg, feature_dim, seed_plan::train_seeds(root_seed));

    SweepEntry entry;
    entry.label = "fraction=" + format_value(f);
    entry.value = f;
    entry.power = estimate_power(cfg, artifacts, pools.p_test, pools.q_test, root_seed);
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<SweepEntry> sweep_architecture(const ExperimentConfig& cfg, const DataConfig& data,
                                           const synth::ShiftScenario& scenario,
                                           const nn::TrainConfig& classifier_cfg,
                                           const nn::TrainConfig& kernel_cfg,
                                           Eigen::Index feature_dim,
                                           std::span<const ArchitectureVariant> variants,
                                           std::uint64_t root_seed) {
  cfg.validate();
  if (variants.empty()) throw ConfigError("sweep_architecture: no variants");

  const std::uint64_t data_seed = derive_seed(root_seed, {seed_plan::kData});
  const synth::ShiftPair pools =
      synth::build_shift_pair(scenario, data.pattern, data.corruption, data.sizes, data_seed);

  std::vector<SweepEntry> out;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    nn::TrainConfig variant_cfg = classifier_cfg;
    variant_cfg.hidden_dims = variants[i].hidden_dims;

    const TrainedArtifacts artifacts = train_artifacts(
        cfg, pools, variant_cfg, kernel_cfg, feature_dim, seed_plan::train_seeds(root_seed));

    SweepEntry entry;
    entry.label = variants[i].name;
    entry.value = static_cast<double>(i);
    entry.power = estimate_power(cfg, artifacts, pools.p_test, pools.q_test, root_seed);
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace subshift::harness
