/// @file sweeps.hpp
/// @brief Ablation protocols: shift strength, training-set size, classifier
/// capacity. Each sweep retrains whatever the swept knob invalidates and
/// reuses everything else.

#pragma once

#include "subshift/power.hpp"

namespace subshift::harness {

struct DataConfig {
  synth::PatternSpec pattern;
  synth::CorruptionSpec corruption;
  synth::PoolSizes sizes;
};

struct SweepEntry {
  std::string label;
  double value = 0.0;
  PowerResult power;
};

/// Oversampling-strength sweep. The base population is drawn once; per w the
/// target pools are re-weighted, the domain classifier and kernel retrained,
/// and the task net (target-independent) reused. Requires an oversampling or
/// null base scenario.
std::vector<SweepEntry> sweep_shift_strength(const ExperimentConfig& cfg, const DataConfig& data,
                                             const nn::TrainConfig& classifier_cfg,
                                             const nn::TrainConfig& kernel_cfg,
                                             Eigen::Index feature_dim, double source_p,
                                             std::span<const double> w_values,
                                             std::uint64_t root_seed);

/// Training-set-size sweep: training folds are subsampled per fraction (the
/// identity fraction 1.0 keeps pools untouched), all extractors retrained.
std::vector<SweepEntry> sweep_training_size(const ExperimentConfig& cfg, const DataConfig& data,
                                            const synth::ShiftScenario& scenario,
                                            const nn::TrainConfig& classifier_cfg,
                                            const nn::TrainConfig& kernel_cfg,
                                            Eigen::Index feature_dim,
                                            std::span<const double> fractions,
                                            std::uint64_t root_seed);

struct ArchitectureVariant {
  std::string name;
  std::vector<Eigen::Index> hidden_dims;
};

/// Domain-classifier capacity sweep; only the C2ST artifact is retrained.
std::vector<SweepEntry> sweep_architecture(const ExperimentConfig& cfg, const DataConfig& data,
                                           const synth::ShiftScenario& scenario,
                                           const nn::TrainConfig& classifier_cfg,
                                           const nn::TrainConfig& kernel_cfg,
                                           Eigen::Index feature_dim,
                                           std::span<const ArchitectureVariant> variants,
                                           std::uint64_t root_seed);

}  // namespace subshift::harness
