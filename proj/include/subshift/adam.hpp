#pragma once

#include "subshift/losses.hpp"
#include "subshift/mlp.hpp"

namespace subshift::nn {

/// Bias-corrected Adam moments, shaped like the network they update.
struct AdamState {
  std::vector<Eigen::MatrixXd> m_weights, v_weights;
  std::vector<Eigen::VectorXd> m_biases, v_biases;
  long step_count = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState init(const MlpParams& net, double lr);
};

/// One in-place Adam update: p -= lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(MlpParams& net, const Gradients& grads, AdamState& state);

}  // namespace subshift::nn
