#include "subshift/mlp.hpp"

#include <cmath>

#include "subshift/errors.hpp"
#include "subshift/rng.hpp"

namespace subshift::nn {

std::size_t MlpParams::parameter_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += static_cast<std::size_t>(weights[l].size()) + static_cast<std::size_t>(biases[l].size());
  }
  return n;
}

MlpParams MlpParams::zeros(const std::vector<Eigen::Index>& dims) {
  if (dims.size() < 2) throw ShapeError("MlpParams: need at least input and output dims");
  MlpParams net;
  net.layer_dims = dims;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l] < 1 || dims[l + 1] < 1) throw ShapeError("MlpParams: dims must be >= 1");
    net.weights.emplace_back(Eigen::MatrixXd::Zero(dims[l + 1], dims[l]));
    net.biases.emplace_back(Eigen::VectorXd::Zero(dims[l + 1]));
  }
  return net;
}

MlpParams MlpParams::kaiming(const std::vector<Eigen::Index>& dims, std::uint64_t seed) {
  MlpParams net = zeros(dims);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(l)}));
    const double bound = std::sqrt(6.0 / static_cast<double>(dims[l]));
    Eigen::MatrixXd& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = rng.uniform_range(-bound, bound);
      }
    }
  }
  return net;
}

Eigen::VectorXd forward(const MlpParams& net, const Eigen::VectorXd& x) {
  if (x.size() != net.input_dim()) {
    throw ShapeError("forward: input dim " + std::to_string(x.size()) + " != " +
                     std::to_string(net.input_dim()));
  }
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Eigen::VectorXd z = net.weights[l] * a + net.biases[l];
    a = (l + 1 == net.layer_count()) ? z : z.cwiseMax(0.0).eval();
  }
  return a;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double mx = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - mx).exp();
  return e / e.sum();
}

}  // namespace subshift::nn
