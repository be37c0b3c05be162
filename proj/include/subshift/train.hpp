/// @file train.hpp
/// @brief Minibatch training loops for the task and domain classifier roles.

#pragma once

#include <cstdint>
#include <vector>

#include "subshift/mlp.hpp"
#include "subshift/types.hpp"

namespace subshift::nn {

struct TrainConfig {
  int batch_size = 64;
  int max_epochs = 100;
  double lr = 1e-3;
  int patience = 10;  // epochs without validation improvement before stopping
  std::uint64_t seed = 0;
  std::vector<Eigen::Index> hidden_dims = {128, 64};

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  MlpParams net;  // checkpoint with the best validation loss
  std::vector<EpochStats> log;
  double best_val_loss = 0.0;
  int best_epoch = -1;
  double val_accuracy = 0.0;  // accuracy of the returned checkpoint
};

/// Trains a C-way classifier on labeled examples (images and labels from the
/// source distribution). Requires class labels on every example.
TrainResult train_task_classifier(const SampleSet& train, const SampleSet& val,
                                  const TrainConfig& cfg);

/// Trains a single-logit domain classifier to separate the two pools,
/// labeling source examples 1 and target examples 0. Minibatches are
/// balanced: half from each pool. Task labels are ignored.
TrainResult train_domain_classifier(const SampleSet& train_p, const SampleSet& train_q,
                                    const SampleSet& val_p, const SampleSet& val_q,
                                    const TrainConfig& cfg);

}  // namespace subshift::nn
