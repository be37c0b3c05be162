#include "subshift/mmd.hpp"

#include <cmath>

#include "subshift/errors.hpp"

namespace subshift::kernel {

namespace {

void check_pair_sizes(std::size_t nx, std::size_t ny) {
  if (nx != ny) {
    throw ShapeError("mmd: sample sizes differ (" + std::to_string(nx) + " vs " +
                     std::to_string(ny) + ")");
  }
  if (nx < 2) throw ShapeError("mmd: need at least 2 examples per sample");
}

/// Everything the batched objective needs, computed once per batch pair.
struct BatchEval {
  nn::ForwardCache cache;
  Eigen::MatrixXd d2_feat;  // pairwise squared distances, feature space
  Eigen::MatrixXd d2_raw;   // pairwise squared distances, input space
  Eigen::MatrixXd g_a;
  Eigen::MatrixXd g_b;
  Eigen::MatrixXd weight;   // d(loss)/dK entries: -+1/(m(m-1))
  double loss = 0.0;
};

BatchEval evaluate_batch(std::span<const Example> x_batch, std::span<const Example> y_batch,
                         const DeepKernelParams& params) {
  check_pair_sizes(x_batch.size(), y_batch.size());
  const auto m = static_cast<Eigen::Index>(x_batch.size());
  const Eigen::Index n = 2 * m;
  const Eigen::Index d = x_batch[0].features.size();

  Eigen::MatrixXd z(n, d);
  for (Eigen::Index i = 0; i < m; ++i) z.row(i) = x_batch[static_cast<std::size_t>(i)].features.transpose();
  for (Eigen::Index i = 0; i < m; ++i) z.row(m + i) = y_batch[static_cast<std::size_t>(i)].features.transpose();

  BatchEval ev;
  ev.cache = nn::forward_cached(params.feature_net, z);
  const Eigen::MatrixXd& f = ev.cache.output();

  ev.d2_feat.setZero(n, n);
  ev.d2_raw.setZero(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u + 1; v < n; ++v) {
      const double df = (f.row(u) - f.row(v)).squaredNorm();
      const double dx = (z.row(u) - z.row(v)).squaredNorm();
      ev.d2_feat(u, v) = ev.d2_feat(v, u) = df;
      ev.d2_raw(u, v) = ev.d2_raw(v, u) = dx;
    }
  }

  const double sa = params.sigma_a(), sb = params.sigma_b();
  ev.g_a = (-ev.d2_feat / (2.0 * sa * sa)).array().exp().matrix();
  ev.g_b = (-ev.d2_raw / (2.0 * sb * sb)).array().exp().matrix();

  const double delta = params.delta();
  const Eigen::MatrixXd k = (((1.0 - delta) * ev.g_a).array() + delta).matrix().cwiseProduct(ev.g_b);

  // loss = -MMD_hat is linear in the kernel entries; `weight` holds dL/dK.
  const double c = 1.0 / (static_cast<double>(m) * static_cast<double>(m - 1));
  ev.weight.setZero(n, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      ev.weight(i, j) -= c;
      ev.weight(m + i, m + j) -= c;
      ev.weight(i, m + j) += c;
      ev.weight(m + i, j) += c;
    }
  }
  ev.loss = ev.weight.cwiseProduct(k).sum();
  return ev;
}

}  // namespace

double mmd_unbiased(const SampleSet& x, const SampleSet& y, const DeepKernelParams& params) {
  check_pair_sizes(x.size(), y.size());
  const std::size_t m = x.size();

  std::vector<Eigen::VectorXd> fx(m), fy(m);
  for (std::size_t i = 0; i < m; ++i) {
    fx[i] = nn::forward(params.feature_net, x.examples[i].features);
    fy[i] = nn::forward(params.feature_net, y.examples[i].features);
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const double k_xx = kernel_from_features(fx[i], fx[j], x.examples[i].features,
                                               x.examples[j].features, params);
      const double k_yy = kernel_from_features(fy[i], fy[j], y.examples[i].features,
                                               y.examples[j].features, params);
      const double k_xy = kernel_from_features(fx[i], fy[j], x.examples[i].features,
                                               y.examples[j].features, params);
      const double k_yx = kernel_from_features(fy[i], fx[j], y.examples[i].features,
                                               x.examples[j].features, params);
      const double h = (k_xx + k_yy) - k_xy - k_yx;
      sum += h;
    }
  }
  return sum / (static_cast<double>(m) * static_cast<double>(m - 1));
}

MmdObjective mmd_objective_and_grad(std::span<const Example> x_batch,
                                    std::span<const Example> y_batch,
                                    const DeepKernelParams& params) {
  const BatchEval ev = evaluate_batch(x_batch, y_batch, params);
  const double delta = params.delta();
  const double sa = params.sigma_a(), sb = params.sigma_b();

  MmdObjective out;
  out.loss = ev.loss;

  // dL/dD2f via g_a; symmetric, so dL/dF = 4 (diag(rowsum) - A) F
  const Eigen::MatrixXd a =
      ev.weight.cwiseProduct(ev.g_b).cwiseProduct(ev.g_a) * (-(1.0 - delta) / (2.0 * sa * sa));
  const Eigen::VectorXd rowsum = a.rowwise().sum();
  const Eigen::MatrixXd& f = ev.cache.output();
  Eigen::MatrixXd d_f = 4.0 * (rowsum.asDiagonal() * f - a * f);
  out.grads.net = nn::backward(params.feature_net, ev.cache, d_f);

  const double d_delta =
      ev.weight.cwiseProduct((1.0 - ev.g_a.array()).matrix()).cwiseProduct(ev.g_b).sum();
  out.grads.d_raw_delta = d_delta * delta * (1.0 - delta);

  const double d_sigma_a = ev.weight.cwiseProduct(ev.g_b)
                               .cwiseProduct(ev.g_a)
                               .cwiseProduct(ev.d2_feat)
                               .sum() *
                           ((1.0 - delta) / (sa * sa * sa));
  out.grads.d_raw_sigma_a = d_sigma_a * logistic(params.raw_sigma_a);

  const Eigen::MatrixXd k_over_gb = (((1.0 - delta) * ev.g_a).array() + delta).matrix();
  const double d_sigma_b =
      ev.weight.cwiseProduct(k_over_gb).cwiseProduct(ev.g_b).cwiseProduct(ev.d2_raw).sum() /
      (sb * sb * sb);
  out.grads.d_raw_sigma_b = d_sigma_b * logistic(params.raw_sigma_b);

  return out;
}

double mmd_objective_value(std::span<const Example> x_batch, std::span<const Example> y_batch,
                           const DeepKernelParams& params) {
  return evaluate_batch(x_batch, y_batch, params).loss;
}

}  // namespace subshift::kernel
