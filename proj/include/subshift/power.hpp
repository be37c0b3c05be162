/// @file power.hpp
/// @brief Rejection-rate estimation over repeated test-fold draws.
///
/// Protocol: artifacts are trained once per scenario on the train/val pools;
/// then for every sample size m and repetition r, two samples of size m are
/// drawn with replacement from the test pools (both from the source pool
/// when estimating the Type I error) and every configured test runs on
/// them. All seeds derive from (root, branch, m, r, slot), so repetitions
/// are independent jobs and any schedule produces identical results.

#pragma once

#include <optional>
#include <unordered_set>

#include "subshift/deep_kernel.hpp"
#include "subshift/kernel_train.hpp"
#include "subshift/permutation.hpp"
#include "subshift/synth.hpp"
#include "subshift/train.hpp"
#include "subshift/two_sample_tests.hpp"
#include "subshift/types.hpp"

namespace subshift::harness {

enum class Method { c2st, mmdd, muks };

const char* method_name(Method m) noexcept;
Method parse_method(const std::string& name);

struct ExperimentConfig {
  std::vector<Method> methods = {Method::c2st, Method::mmdd, Method::muks};
  std::vector<std::size_t> sample_sizes = {10, 30, 50, 100, 200, 500};
  int repetitions = 100;
  double alpha = 0.05;
  int n_permutations = 200;
  int threads = 1;

  void validate() const;
};

/// Everything the tests need at evaluation time, plus the identities of all
/// examples seen during training/validation for fold-hygiene checks.
struct TrainedArtifacts {
  std::optional<nn::MlpParams> task_net;
  std::optional<nn::MlpParams> domain_net;
  std::optional<kernel::DeepKernelParams> kernel;
  std::unordered_set<std::uint64_t> training_origins;

  double task_val_accuracy = 0.0;
  double domain_val_accuracy = 0.0;
  double kernel_init_val_loss = 0.0;
  double kernel_best_val_loss = 0.0;
};

struct TrainSeeds {
  std::uint64_t task = 0;
  std::uint64_t domain = 0;
  std::uint64_t kernel = 0;
};

/// Trains exactly the artifacts the configured methods require.
TrainedArtifacts train_artifacts(const ExperimentConfig& cfg, const synth::ShiftPair& pools,
                                 const nn::TrainConfig& classifier_cfg,
                                 const nn::TrainConfig& kernel_cfg, Eigen::Index feature_dim,
                                 const TrainSeeds& seeds);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval at 95% coverage.
Interval wilson_interval(int successes, int trials);

/// Central coverage band of Binomial(n, p), returned as rates.
Interval binomial_band(int n, double p, double coverage);

struct PowerPoint {
  Method method = Method::c2st;
  std::size_t m = 0;
  int rejected = 0;
  int repetitions = 0;
  double rate = 0.0;
  Interval ci;
};

struct PowerCurve {
  std::vector<PowerPoint> points;  // ordered by (m, method)

  [[nodiscard]] const PowerPoint& at(Method method, std::size_t m) const;
};

/// One executed test, addressable for replay comparison.
struct RunOutcome {
  Method method = Method::c2st;
  std::size_t m = 0;
  int repetition = 0;
  stats::TestOutcome outcome;
};

struct PowerResult {
  PowerCurve curve;
  std::vector<RunOutcome> outcomes;  // ordered by (m, repetition, method)
};

/// Rejection rates when X ~ source test pool and Y ~ target test pool.
PowerResult estimate_power(const ExperimentConfig& cfg, const TrainedArtifacts& artifacts,
                           const SampleSet& p_test, const SampleSet& q_test,
                           std::uint64_t root_seed);

/// Type I error: both samples drawn independently from the source test pool.
PowerResult estimate_type1(const ExperimentConfig& cfg, const TrainedArtifacts& artifacts,
                           const SampleSet& p_test, std::uint64_t root_seed);

/// Runs `job(0..n_jobs-1)` on `threads` workers. Results must be written to
/// per-job slots; the schedule carries no state, so outputs are identical to
/// the serial order. Rethrows the first job exception.
void parallel_for_jobs(int threads, std::size_t n_jobs,
                       const std::function<void(std::size_t)>& job);

}  // namespace subshift::harness
