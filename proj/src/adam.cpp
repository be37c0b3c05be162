#include "subshift/adam.hpp"

#include <cmath>

#include "subshift/errors.hpp"

namespace subshift::nn {

AdamState AdamState::init(const MlpParams& net, double lr) {
  AdamState s;
  s.lr = lr;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    s.m_weights.emplace_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.v_weights.emplace_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.m_biases.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    s.v_biases.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  return s;
}

namespace {

template <typename Mat>
void update_block(Mat& param, const Mat& grad, Mat& m, Mat& v, const AdamState& s,
                  double bc1, double bc2) {
  m = s.beta1 * m + (1.0 - s.beta1) * grad;
  v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
  param.array() -= s.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + s.eps);
}

}  // namespace

void adam_step(MlpParams& net, const Gradients& grads, AdamState& state) {
  if (grads.d_weights.size() != net.layer_count()) {
    throw ShapeError("adam_step: gradient layer count mismatch");
  }
  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    update_block(net.weights[l], grads.d_weights[l], state.m_weights[l], state.v_weights[l],
                 state, bc1, bc2);
    update_block(net.biases[l], grads.d_biases[l], state.m_biases[l], state.v_biases[l],
                 state, bc1, bc2);
  }
}

}  // namespace subshift::nn
