/// @file kernel_train.hpp
/// @brief Trains the deep kernel by maximizing the MMD estimate on paired
/// equal-size minibatches from the two training pools.

#pragma once

#include "subshift/mmd.hpp"
#include "subshift/train.hpp"

namespace subshift::kernel {

struct KernelTrainResult {
  DeepKernelParams kernel;  // checkpoint with the best validation loss
  std::vector<nn::EpochStats> log;
  double best_val_loss = 0.0;
  int best_epoch = -1;
  double init_val_loss = 0.0;  // validation loss of the untrained kernel
};

/// Feature net [d, hidden..., feature_dim]; delta starts at 0.5 and both
/// length scales at the median pairwise distance of an initialization batch.
/// Validation loss is the mean per-batch -MMD_hat over fixed val pairings.
KernelTrainResult train_deep_kernel(const SampleSet& train_p, const SampleSet& train_q,
                                    const SampleSet& val_p, const SampleSet& val_q,
                                    const nn::TrainConfig& cfg, Eigen::Index feature_dim = 128);

}  // namespace subshift::kernel
