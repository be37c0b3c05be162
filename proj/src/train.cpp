#include "subshift/train.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "subshift/adam.hpp"
#include "subshift/errors.hpp"
#include "subshift/losses.hpp"
#include "subshift/rng.hpp"

namespace subshift::nn {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("TrainConfig: batch_size must be >= 1");
  if (max_epochs < 0) throw ConfigError("TrainConfig: max_epochs must be >= 0");
  if (patience < 1) throw ConfigError("TrainConfig: patience must be >= 1");
  if (lr <= 0.0) throw ConfigError("TrainConfig: lr must be > 0");
  for (Eigen::Index h : hidden_dims) {
    if (h < 1) throw ConfigError("TrainConfig: hidden dims must be >= 1");
  }
}

namespace {

std::vector<Eigen::Index> full_dims(Eigen::Index input, const std::vector<Eigen::Index>& hidden,
                                    Eigen::Index output) {
  std::vector<Eigen::Index> dims;
  dims.push_back(input);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output);
  return dims;
}

/// Epoch/step loop shared by both roles. `epoch_batches` yields the ordered
/// minibatches for one epoch; the checkpoint with the lowest validation loss
/// wins, with early stopping after `patience` stale epochs.
template <typename BatchProvider>
TrainResult run_training(MlpParams init, const std::vector<Example>& val_examples,
                         const TrainConfig& cfg, BatchProvider&& epoch_batches) {
  TrainResult result;
  result.net = std::move(init);
  if (cfg.max_epochs == 0) {
    result.best_epoch = -1;  // initialization checkpoint
    return result;
  }

  MlpParams net = result.net;
  AdamState adam = AdamState::init(net, cfg.lr);
  MlpParams best = net;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = -1;
  int stale = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const std::vector<std::vector<Example>> batches = epoch_batches(epoch);
    if (batches.empty()) throw DataError("train: no full minibatch fits the training pool");

    double train_loss = 0.0;
    for (const auto& batch : batches) {
      LossGrad lg = cross_entropy_loss_and_grad(net, batch);
      adam_step(net, lg.grads, adam);
      train_loss += lg.loss;
    }
    train_loss /= static_cast<double>(batches.size());

    const double val_loss = cross_entropy_loss(net, val_examples);
    result.log.push_back({epoch, train_loss, val_loss});

    if (val_loss < best_val) {
      best_val = val_loss;
      best = net;
      best_epoch = epoch;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }

  result.net = std::move(best);
  result.best_val_loss = best_val;
  result.best_epoch = best_epoch;
  result.val_accuracy = classification_accuracy(result.net, val_examples);
  return result;
}

}  // namespace

TrainResult train_task_classifier(const SampleSet& train, const SampleSet& val,
                                  const TrainConfig& cfg) {
  cfg.validate();
  if (train.empty() || val.empty()) throw DataError("train_task_classifier: empty pool");
  if (train.class_count == kNoLabel || train.class_count < 2) {
    throw DataError("train_task_classifier: training pool carries no class labels");
  }
  for (const Example& ex : train.examples) {
    if (ex.class_label == kNoLabel) {
      throw DataError("train_task_classifier: example without class label");
    }
  }

  const auto dims = full_dims(train.dimension, cfg.hidden_dims, train.class_count);
  MlpParams init = MlpParams::kaiming(dims, derive_seed(cfg.seed, {0}));

  return run_training(std::move(init), val.examples, cfg, [&](int epoch) {
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(cfg.seed, {1, static_cast<std::uint64_t>(epoch)}));
    rng.shuffle(order);

    std::vector<std::vector<Example>> batches;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<Example> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) batch.push_back(train.examples[order[i]]);
      batches.push_back(std::move(batch));
    }
    return batches;
  });
}

TrainResult train_domain_classifier(const SampleSet& train_p, const SampleSet& train_q,
                                    const SampleSet& val_p, const SampleSet& val_q,
                                    const TrainConfig& cfg) {
  cfg.validate();
  if (train_p.empty() || train_q.empty() || val_p.empty() || val_q.empty()) {
    throw DataError("train_domain_classifier: empty pool");
  }
  if (train_p.dimension != train_q.dimension) {
    throw ShapeError("train_domain_classifier: P and Q dimensions differ");
  }

  auto relabel = [](const SampleSet& set, int domain) {
    std::vector<Example> out = set.examples;
    for (Example& ex : out) ex.class_label = domain;
    return out;
  };
  const std::vector<Example> p_lab = relabel(train_p, 1);
  const std::vector<Example> q_lab = relabel(train_q, 0);

  std::vector<Example> val_lab = relabel(val_p, 1);
  {
    std::vector<Example> qv = relabel(val_q, 0);
    val_lab.insert(val_lab.end(), qv.begin(), qv.end());
  }

  const std::size_t half = std::max<std::size_t>(1, static_cast<std::size_t>(cfg.batch_size) / 2);
  const std::size_t steps = std::min(p_lab.size(), q_lab.size()) / half;
  if (steps == 0) {
    throw DataError("train_domain_classifier: pools smaller than half a minibatch");
  }

  const auto dims = full_dims(train_p.dimension, cfg.hidden_dims, 1);
  MlpParams init = MlpParams::kaiming(dims, derive_seed(cfg.seed, {0}));

  return run_training(std::move(init), val_lab, cfg, [&, half, steps](int epoch) {
    std::vector<std::size_t> p_order(p_lab.size()), q_order(q_lab.size());
    std::iota(p_order.begin(), p_order.end(), 0);
    std::iota(q_order.begin(), q_order.end(), 0);
    Rng rp(derive_seed(cfg.seed, {1, static_cast<std::uint64_t>(epoch), 0}));
    Rng rq(derive_seed(cfg.seed, {1, static_cast<std::uint64_t>(epoch), 1}));
    rp.shuffle(p_order);
    rq.shuffle(q_order);

    std::vector<std::vector<Example>> batches;
    batches.reserve(steps);
    for (std::size_t s = 0; s < steps; ++s) {
      std::vector<Example> batch;
      batch.reserve(2 * half);
      for (std::size_t i = 0; i < half; ++i) batch.push_back(p_lab[p_order[s * half + i]]);
      for (std::size_t i = 0; i < half; ++i) batch.push_back(q_lab[q_order[s * half + i]]);
      batches.push_back(std::move(batch));
    }
    return batches;
  });
}

}  // namespace subshift::nn
