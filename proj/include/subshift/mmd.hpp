/// @file mmd.hpp
/// @brief Unbiased MMD estimate and its training objective.
///
/// MMD_hat(X, Y) = 1/(m(m-1)) * sum_{i != j} H_ij with
/// H_ij = k(x_i, x_j) + k(y_i, y_j) - k(x_i, y_j) - k(y_i, x_j).
/// The estimate is unbiased and may be negative.

#pragma once

#include <span>

#include "subshift/deep_kernel.hpp"
#include "subshift/losses.hpp"
#include "subshift/types.hpp"

namespace subshift::kernel {

/// Literal double-sum evaluation of the unbiased estimator.
/// Requires |X| == |Y| == m >= 2.
double mmd_unbiased(const SampleSet& x, const SampleSet& y, const DeepKernelParams& params);

struct KernelGradients {
  nn::Gradients net;
  double d_raw_delta = 0.0;
  double d_raw_sigma_a = 0.0;
  double d_raw_sigma_b = 0.0;
};

struct MmdObjective {
  double loss = 0.0;  // -MMD_hat on the batch pair
  KernelGradients grads;
};

/// Loss -MMD_hat(X, Y) with exact reverse-mode gradients through the kernel
/// scalars and the feature net. Batches must be equal-size with m >= 2.
MmdObjective mmd_objective_and_grad(std::span<const Example> x_batch,
                                    std::span<const Example> y_batch,
                                    const DeepKernelParams& params);

/// Loss value only, same batched evaluation as the gradient path.
double mmd_objective_value(std::span<const Example> x_batch, std::span<const Example> y_batch,
                           const DeepKernelParams& params);

}  // namespace subshift::kernel
