#include "subshift/deep_kernel.hpp"

#include <cmath>
#include <fstream>

#include "subshift/checkpoint.hpp"
#include "subshift/errors.hpp"

namespace subshift::kernel {

double logistic(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) noexcept { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double softplus_inverse(double y) {
  if (y <= 0.0) throw ConfigError("softplus_inverse: argument must be > 0");
  // log(exp(y) - 1), written to stay finite for large y
  return y + std::log1p(-std::exp(-y));
}

double gaussian(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double sigma) {
  if (sigma <= 0.0) throw ConfigError("gaussian: sigma must be > 0");
  if (u.size() != v.size()) throw ShapeError("gaussian: dimension mismatch");
  return std::exp(-(u - v).squaredNorm() / (2.0 * sigma * sigma));
}

double kernel_from_features(const Eigen::VectorXd& fx, const Eigen::VectorXd& fy,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const DeepKernelParams& params) {
  const double d = params.delta();
  const double g_a = std::exp(-(fx - fy).squaredNorm() / (2.0 * params.sigma_a() * params.sigma_a()));
  const double g_b = std::exp(-(x - y).squaredNorm() / (2.0 * params.sigma_b() * params.sigma_b()));
  return ((1.0 - d) * g_a + d) * g_b;
}

double deep_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   const DeepKernelParams& params) {
  return kernel_from_features(nn::forward(params.feature_net, x), nn::forward(params.feature_net, y),
                              x, y, params);
}

GramBlock gram_block(const SampleSet& x, const SampleSet& y, const DeepKernelParams& params) {
  if (x.empty() || y.empty()) throw DataError("gram_block: empty sample");
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto m = static_cast<Eigen::Index>(y.size());

  std::vector<Eigen::VectorXd> fx(x.size()), fy(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) fx[i] = nn::forward(params.feature_net, x.examples[i].features);
  for (std::size_t j = 0; j < y.size(); ++j) fy[j] = nn::forward(params.feature_net, y.examples[j].features);

  GramBlock g;
  g.k_xx.resize(n, n);
  g.k_yy.resize(m, m);
  g.k_xy.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g.k_xx(i, j) = kernel_from_features(fx[i], fx[j], x.examples[i].features,
                                          x.examples[j].features, params);
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      g.k_yy(i, j) = kernel_from_features(fy[i], fy[j], y.examples[i].features,
                                          y.examples[j].features, params);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      g.k_xy(i, j) = kernel_from_features(fx[i], fy[j], x.examples[i].features,
                                          y.examples[j].features, params);
    }
  }
  return g;
}

namespace {
constexpr char kKernelMagic[8] = {'S', 'S', 'K', 'R', 'N', '1', '\n', '\0'};
}

void save_kernel(const std::filesystem::path& path, const DeepKernelParams& params) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot open for writing: " + path.string());
  f.write(kKernelMagic, sizeof(kKernelMagic));
  nn::write_mlp(f, params.feature_net);
  const double scalars[3] = {params.raw_delta, params.raw_sigma_a, params.raw_sigma_b};
  f.write(reinterpret_cast<const char*>(scalars), sizeof(scalars));
  if (!f) throw DataError("kernel checkpoint: write failed");
}

DeepKernelParams load_kernel(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot open checkpoint: " + path.string());
  char magic[8];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, kKernelMagic, sizeof(kKernelMagic)) != 0) {
    throw DataError("kernel checkpoint: bad magic");
  }
  DeepKernelParams params;
  params.feature_net = nn::read_mlp(f);
  double scalars[3];
  f.read(reinterpret_cast<char*>(scalars), sizeof(scalars));
  if (!f) throw DataError("kernel checkpoint: truncated");
  params.raw_delta = scalars[0];
  params.raw_sigma_a = scalars[1];
  params.raw_sigma_b = scalars[2];
  return params;
}

}  // namespace subshift::kernel
