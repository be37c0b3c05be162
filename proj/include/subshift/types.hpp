/// @file types.hpp
/// @brief Sample containers shared by generation, training and testing.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace subshift {

using FeatureVector = Eigen::VectorXd;

/// Sentinel for absent class labels / subgroup tags.
inline constexpr int kNoLabel = -1;

struct Example {
  FeatureVector features;
  int class_label = kNoLabel;   // in [0, C) when present
  int subgroup_tag = kNoLabel;  // 0 = intact, 1 = corrupted
  std::uint64_t origin = 0;     // identity of the generating draw; survives
                                // splits and resampling (fold hygiene)
};

/// Ordered collection of fixed-dimension examples. Immutable by convention
/// once built; all operations return new sets.
struct SampleSet {
  std::vector<Example> examples;
  Eigen::Index dimension = 0;
  int class_count = kNoLabel;  // C, or kNoLabel when unlabeled
  std::string provenance;      // e.g. "P/train"; carried through draws

  [[nodiscard]] std::size_t size() const noexcept { return examples.size(); }
  [[nodiscard]] bool empty() const noexcept { return examples.empty(); }

  /// Checks dimension consistency, entry finiteness and label ranges.
  /// Throws DataError / ShapeError. Called at construction boundaries
  /// (I/O, generation), not on every access.
  void validate() const;

  /// Stacks features row-wise into an n x d matrix.
  [[nodiscard]] Eigen::MatrixXd feature_matrix() const;
};

struct SplitSpec {
  double train_fraction = 0.8;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;

  /// Fractions must lie in (0,1) and sum to 1 within 1e-9.
  void validate() const;
};

}  // namespace subshift
