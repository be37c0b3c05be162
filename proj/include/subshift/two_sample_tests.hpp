/// @file two_sample_tests.hpp
/// @brief The three shift detection tests: C2ST, MMDD and MUKS.

#pragma once

#include <vector>

#include "subshift/deep_kernel.hpp"
#include "subshift/mlp.hpp"
#include "subshift/permutation.hpp"
#include "subshift/types.hpp"

namespace subshift::stats {

/// Mean logit difference of the domain classifier: t = mean f(X) - mean f(Y).
/// Training labels the source 1 and the target 0, so a shift pushes t up.
double c2st_statistic(const SampleSet& x, const SampleSet& y, const nn::MlpParams& domain_net);

/// Permutation-calibrated C2ST. Logits are computed once for the pooled
/// sample; permutations only re-average them, which reproduces the
/// statistic's arithmetic exactly.
TestOutcome c2st_test(const SampleSet& x, const SampleSet& y, const nn::MlpParams& domain_net,
                      const PermutationConfig& cfg);

/// Permutation-calibrated MMD test with the given deep kernel. The pooled
/// Gram matrix is evaluated once; each permutation re-splits it using
/// column-sum identities (algebraically equal to the literal double sum of
/// the unbiased estimator on the permuted halves).
TestOutcome mmd_test(const SampleSet& x, const SampleSet& y,
                     const kernel::DeepKernelParams& params, const PermutationConfig& cfg);

struct MuksResult {
  std::vector<double> statistics;  // per-class KS statistic on softmax outputs
  std::vector<double> p_values;
  double alpha = 0.05;
  bool reject = false;  // any p_c <= alpha / C
};

/// Bonferroni rule shared by muks_test and its tests.
bool muks_decide(std::span<const double> p_values, double alpha);

/// Per-class two-sample KS tests on the task net's softmax outputs with
/// Bonferroni correction across the C classes.
MuksResult muks_test(const SampleSet& x, const SampleSet& y, const nn::MlpParams& task_net,
                     double alpha);

/// Summary adapter for result tallies: statistic = max_c t_c and
/// p_value = min_c p_c (reject compares it against alpha / C).
TestOutcome muks_outcome(const MuksResult& result, std::size_t m, std::uint64_t seed);

}  // namespace subshift::stats
