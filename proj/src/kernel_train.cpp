#include "subshift/kernel_train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "subshift/adam.hpp"
#include "subshift/errors.hpp"
#include "subshift/rng.hpp"

namespace subshift::kernel {

namespace {

/// Adam moments for one unconstrained scalar, sharing the step count of the
/// network optimizer.
struct ScalarAdam {
  double m = 0.0, v = 0.0;

  void step(double& param, double grad, const nn::AdamState& s, double bc1, double bc2) {
    m = s.beta1 * m + (1.0 - s.beta1) * grad;
    v = s.beta2 * v + (1.0 - s.beta2) * grad * grad;
    param -= s.lr * (m / bc1) / (std::sqrt(v / bc2) + s.eps);
  }
};

double median_pairwise_distance(const SampleSet& p, const SampleSet& q, std::size_t cap) {
  std::vector<const Eigen::VectorXd*> pts;
  for (std::size_t i = 0; i < std::min(cap, p.size()); ++i) pts.push_back(&p.examples[i].features);
  for (std::size_t i = 0; i < std::min(cap, q.size()); ++i) pts.push_back(&q.examples[i].features);

  std::vector<double> dists;
  dists.reserve(pts.size() * (pts.size() - 1) / 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      dists.push_back((*pts[i] - *pts[j]).norm());
    }
  }
  if (dists.empty()) return 1.0;
  std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
  const double med = dists[dists.size() / 2];
  return med > 0.0 ? med : 1.0;
}

std::vector<std::pair<std::span<const Example>, std::span<const Example>>> fixed_val_pairs(
    const SampleSet& val_p, const SampleSet& val_q, std::size_t batch) {
  std::vector<std::pair<std::span<const Example>, std::span<const Example>>> pairs;
  const std::size_t steps = std::min(val_p.size(), val_q.size()) / batch;
  for (std::size_t s = 0; s < steps; ++s) {
    pairs.emplace_back(std::span<const Example>(val_p.examples).subspan(s * batch, batch),
                       std::span<const Example>(val_q.examples).subspan(s * batch, batch));
  }
  return pairs;
}

double mean_val_loss(
    const std::vector<std::pair<std::span<const Example>, std::span<const Example>>>& pairs,
    const DeepKernelParams& params) {
  double acc = 0.0;
  for (const auto& [xb, yb] : pairs) acc += mmd_objective_value(xb, yb, params);
  return acc / static_cast<double>(pairs.size());
}

}  // namespace

KernelTrainResult train_deep_kernel(const SampleSet& train_p, const SampleSet& train_q,
                                    const SampleSet& val_p, const SampleSet& val_q,
                                    const nn::TrainConfig& cfg, Eigen::Index feature_dim) {
  cfg.validate();
  if (train_p.empty() || train_q.empty()) throw DataError("train_deep_kernel: empty training pool");
  if (train_p.dimension != train_q.dimension) {
    throw ShapeError("train_deep_kernel: P and Q dimensions differ");
  }
  const auto batch = static_cast<std::size_t>(std::max(2, cfg.batch_size));
  if (std::min(train_p.size(), train_q.size()) < batch) {
    throw DataError("train_deep_kernel: pools smaller than one minibatch");
  }

  std::vector<Eigen::Index> dims;
  dims.push_back(train_p.dimension);
  dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
  dims.push_back(feature_dim);

  KernelTrainResult result;
  result.kernel.feature_net = nn::MlpParams::kaiming(dims, derive_seed(cfg.seed, {0}));
  result.kernel.raw_delta = 0.0;  // delta = 0.5
  const double med = median_pairwise_distance(train_p, train_q, 256);
  result.kernel.raw_sigma_a = softplus_inverse(med);
  result.kernel.raw_sigma_b = softplus_inverse(med);

  if (cfg.max_epochs == 0) return result;

  const auto val_pairs = fixed_val_pairs(val_p, val_q, batch);
  if (val_pairs.empty()) throw DataError("train_deep_kernel: validation pools smaller than one minibatch");
  result.init_val_loss = mean_val_loss(val_pairs, result.kernel);

  DeepKernelParams params = result.kernel;
  nn::AdamState adam = nn::AdamState::init(params.feature_net, cfg.lr);
  ScalarAdam ad_delta, ad_sigma_a, ad_sigma_b;

  DeepKernelParams best = params;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = -1;
  int stale = 0;

  const std::size_t steps = std::min(train_p.size(), train_q.size()) / batch;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::vector<std::size_t> p_order(train_p.size()), q_order(train_q.size());
    std::iota(p_order.begin(), p_order.end(), 0);
    std::iota(q_order.begin(), q_order.end(), 0);
    Rng rp(derive_seed(cfg.seed, {1, static_cast<std::uint64_t>(epoch), 0}));
    Rng rq(derive_seed(cfg.seed, {1, static_cast<std::uint64_t>(epoch), 1}));
    rp.shuffle(p_order);
    rq.shuffle(q_order);

    double train_loss = 0.0;
    std::vector<Example> xb(batch), yb(batch);
    for (std::size_t s = 0; s < steps; ++s) {
      for (std::size_t i = 0; i < batch; ++i) {
        xb[i] = train_p.examples[p_order[s * batch + i]];
        yb[i] = train_q.examples[q_order[s * batch + i]];
      }
      MmdObjective obj = mmd_objective_and_grad(xb, yb, params);
      train_loss += obj.loss;

      nn::adam_step(params.feature_net, obj.grads.net, adam);
      const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.step_count));
      const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.step_count));
      ad_delta.step(params.raw_delta, obj.grads.d_raw_delta, adam, bc1, bc2);
      ad_sigma_a.step(params.raw_sigma_a, obj.grads.d_raw_sigma_a, adam, bc1, bc2);
      ad_sigma_b.step(params.raw_sigma_b, obj.grads.d_raw_sigma_b, adam, bc1, bc2);
    }
    train_loss /= static_cast<double>(steps);

    const double val_loss = mean_val_loss(val_pairs, params);
    result.log.push_back({epoch, train_loss, val_loss});

    if (val_loss < best_val) {
      best_val = val_loss;
      best = params;
      best_epoch = epoch;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }

  result.kernel = std::move(best);
  result.best_val_loss = best_val;
  result.best_epoch = best_epoch;
  return result;
}

}  // namespace subshift::kernel
