/// @file permutation.hpp
/// @brief One-sided Monte Carlo permutation test with add-one correction.
///
/// The pooled sample X ++ Y is re-split into equal halves n_permutations
/// times; p = (1 + #{t_perm >= t_obs}) / (1 + n_permutations). Each
/// permutation shuffles with its own seed derived from (seed, index), so
/// replicates are schedule-independent.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "subshift/types.hpp"

namespace subshift::stats {

struct PermutationConfig {
  int n_permutations = 200;
  double alpha = 0.05;
  std::uint64_t seed = 0;

  /// n_permutations >= 19 keeps the p-value resolution at or below the
  /// default alpha; alpha must lie in (0,1).
  void validate() const;
};

struct TestOutcome {
  std::string method;
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
  std::size_t m = 0;  // per-sample size
  double alpha = 0.05;
  int n_permutations = 0;
  std::uint64_t seed = 0;
};

using SampleStatistic = std::function<double(const SampleSet&, const SampleSet&)>;

/// Reference permutation test: materializes each permuted half-pair as a
/// SampleSet and evaluates `statistic` on it. Requires |X| == |Y|.
TestOutcome permutation_test(const SampleStatistic& statistic, const SampleSet& x,
                             const SampleSet& y, const PermutationConfig& cfg);

/// Index-level engine behind permutation_test and the fast test paths.
/// `statistic` sees the pooled indices of each half; index 0..m-1 is X and
/// m..2m-1 is Y in the observed (identity) split.
using IndexedStatistic =
    std::function<double(std::span<const std::size_t>, std::span<const std::size_t>)>;

TestOutcome permutation_test_indexed(const IndexedStatistic& statistic, std::size_t m,
                                     const PermutationConfig& cfg);

}  // namespace subshift::stats
