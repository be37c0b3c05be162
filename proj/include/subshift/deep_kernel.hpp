/// @file deep_kernel.hpp
/// @brief Learned kernel: Gaussians on neural features and on raw inputs.
///
/// k(x, y) = ((1 - delta) * g_a(f(x), f(y)) + delta) * g_b(x, y)
/// with g(u, v) = exp(-|u - v|^2 / (2 sigma^2)). delta is kept in (0,1)
/// through a logistic reparameterization and both length scales positive
/// through softplus, so all three scalars train unconstrained alongside the
/// feature net f.

#pragma once

#include <Eigen/Dense>
#include <filesystem>

#include "subshift/mlp.hpp"
#include "subshift/types.hpp"

namespace subshift::kernel {

double logistic(double x) noexcept;
double softplus(double x) noexcept;
double softplus_inverse(double y);

struct DeepKernelParams {
  nn::MlpParams feature_net;
  double raw_delta = 0.0;
  double raw_sigma_a = 0.0;
  double raw_sigma_b = 0.0;

  [[nodiscard]] double delta() const noexcept { return logistic(raw_delta); }
  [[nodiscard]] double sigma_a() const noexcept { return softplus(raw_sigma_a); }
  [[nodiscard]] double sigma_b() const noexcept { return softplus(raw_sigma_b); }
};

/// exp(-|u - v|^2 / (2 sigma^2)). Throws on sigma <= 0.
double gaussian(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double sigma);

/// Kernel value with already-computed features. All kernel evaluation paths
/// (scalar, Gram, MMD) funnel through this one function.
double kernel_from_features(const Eigen::VectorXd& fx, const Eigen::VectorXd& fy,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const DeepKernelParams& params);

/// Full kernel evaluation including the feature-net forward passes.
double deep_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   const DeepKernelParams& params);

/// Kernel evaluations between and within two equal-size samples.
struct GramBlock {
  Eigen::MatrixXd k_xx;
  Eigen::MatrixXd k_yy;
  Eigen::MatrixXd k_xy;
};

GramBlock gram_block(const SampleSet& x, const SampleSet& y, const DeepKernelParams& params);

void save_kernel(const std::filesystem::path& path, const DeepKernelParams& params);
DeepKernelParams load_kernel(const std::filesystem::path& path);

}  // namespace subshift::kernel
