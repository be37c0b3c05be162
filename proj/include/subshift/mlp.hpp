/// @file mlp.hpp
/// @brief Fully connected network: ReLU hidden layers, linear output.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace subshift::nn {

struct MlpParams {
  std::vector<Eigen::Index> layer_dims;   // [input, hidden..., output]
  std::vector<Eigen::MatrixXd> weights;   // weights[l] is dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;    // biases[l] is dims[l+1]

  [[nodiscard]] Eigen::Index input_dim() const noexcept { return layer_dims.front(); }
  [[nodiscard]] Eigen::Index output_dim() const noexcept { return layer_dims.back(); }
  [[nodiscard]] std::size_t layer_count() const noexcept { return weights.size(); }
  [[nodiscard]] std::size_t parameter_count() const noexcept;

  static MlpParams zeros(const std::vector<Eigen::Index>& dims);

  /// Kaiming-uniform weights (bound sqrt(6 / fan_in), filled row by row,
  /// one derived seed per layer), zero biases.
  static MlpParams kaiming(const std::vector<Eigen::Index>& dims, std::uint64_t seed);
};

/// Single-vector forward pass: affine + ReLU on hidden layers, identity
/// output. All inference paths go through this (row by row), so logits and
/// features never depend on how callers batch their inputs.
Eigen::VectorXd forward(const MlpParams& net, const Eigen::VectorXd& x);

/// Max-subtracted softmax; entries positive, summing to 1.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

}  // namespace subshift::nn
