/// @file losses.hpp
/// @brief Cross-entropy losses with exact reverse-mode gradients.

#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "subshift/mlp.hpp"
#include "subshift/types.hpp"

namespace subshift::nn {

struct Gradients {
  std::vector<Eigen::MatrixXd> d_weights;
  std::vector<Eigen::VectorXd> d_biases;

  static Gradients zeros_like(const MlpParams& net);
};

struct LossGrad {
  double loss = 0.0;
  Gradients grads;
};

/// Batched forward pass that caches activations for backpropagation.
/// Training-only; inference uses nn::forward.
struct ForwardCache {
  Eigen::MatrixXd input;                    // n x d
  std::vector<Eigen::MatrixXd> pre;         // pre-activations Z_l, n x dims[l+1]
  std::vector<Eigen::MatrixXd> act;         // post-activations A_l (ReLU), hidden only
  [[nodiscard]] const Eigen::MatrixXd& output() const { return pre.back(); }
};

ForwardCache forward_cached(const MlpParams& net, const Eigen::MatrixXd& X);

/// Backpropagates d(loss)/d(output) through the cached pass.
Gradients backward(const MlpParams& net, const ForwardCache& cache,
                   const Eigen::MatrixXd& d_output);

/// Mean negative log-likelihood of the batch and its gradients.
/// Multiclass (softmax link) when the net has C >= 2 outputs; with a single
/// output the class label must be 0/1 and the logistic link is used.
/// Labels are taken from Example::class_label; absent labels are an error.
LossGrad cross_entropy_loss_and_grad(const MlpParams& net, std::span<const Example> batch);

/// Loss only (no gradients), for validation scoring.
double cross_entropy_loss(const MlpParams& net, std::span<const Example> batch);

/// Fraction of batch examples whose prediction matches the label. For the
/// single-logit case the prediction is logit > 0.
double classification_accuracy(const MlpParams& net, std::span<const Example> batch);

}  // namespace subshift::nn
