/// @file synth.hpp
/// @brief Synthetic image-like datasets with a hidden corrupted subgroup.
///
/// Examples are class prototypes (thresholded smoothed noise, one pattern
/// per class) plus per-pixel Gaussian noise, clamped to [0,1]. A seeded
/// fraction of examples gets an axis-aligned occlusion rectangle and
/// subgroup_tag = 1. Source/target pool pairs realize either a corruption
/// probability change or prevalence oversampling of the corrupted subgroup.

#pragma once

#include <cstdint>
#include <vector>

#include "subshift/types.hpp"

namespace subshift::synth {

struct PatternSpec {
  int side_length = 16;  // images are side_length^2 pixels
  int class_count = 10;
  std::uint64_t prototype_seed = 7;
  double noise_sigma = 0.25;

  void validate() const;
};

struct CorruptionSpec {
  double probability = 0.5;     // chance an example is occluded
  double rect_min_frac = 0.25;  // occlusion side as fraction of image side
  double rect_max_frac = 0.5;
  double fill_value = 0.0;

  void validate() const;
};

/// One shift mechanism at a time: either the corruption probability changes
/// between source and target, or the corrupted subgroup is oversampled.
/// source_p == target_p with w == 1 encodes the null (P = Q).
struct ShiftScenario {
  double source_p = 0.5;
  double target_p = 1.0;
  double oversample_w = 1.0;

  void validate() const;
  [[nodiscard]] bool is_null() const noexcept {
    return source_p == target_p && oversample_w == 1.0;
  }
  [[nodiscard]] bool uses_oversampling() const noexcept { return oversample_w > 1.0; }
};

struct PoolSizes {
  std::size_t train = 4000;
  std::size_t val = 1000;
  std::size_t test = 1000;
};

/// Train/val/test pools for both distributions.
struct ShiftPair {
  SampleSet p_train, p_val, p_test;
  SampleSet q_train, q_val, q_test;
};

/// The per-class prototype patterns, values in {0.1, 0.9}.
std::vector<FeatureVector> build_prototypes(const PatternSpec& pattern);

SampleSet generate_dataset(std::size_t n, const PatternSpec& pattern,
                           const CorruptionSpec& corruption, std::uint64_t seed,
                           const std::string& provenance = "synth");

/// Occludes a uniformly placed square patch with side in
/// [rect_min_frac, rect_max_frac] * image side, set to fill_value.
/// Draw order: side fraction, then top row, then left column.
FeatureVector apply_occlusion(const FeatureVector& img, const CorruptionSpec& spec,
                              std::uint64_t seed);

/// Resamples `pool` to its own size with weight `w` on tagged examples
/// (subgroup_tag == 1) and 1 otherwise. Expected tagged prevalence becomes
/// w q / (w q + 1 - q) for base prevalence q.
SampleSet oversample_subgroup(const SampleSet& pool, double w, std::uint64_t seed);

ShiftPair build_shift_pair(const ShiftScenario& scenario, const PatternSpec& pattern,
                           const CorruptionSpec& corruption, const PoolSizes& sizes,
                           std::uint64_t seed);

}  // namespace subshift::synth
