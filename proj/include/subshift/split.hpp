#pragma once

#include "subshift/types.hpp"

namespace subshift {

struct DataSplit {
  SampleSet train;
  SampleSet val;
  SampleSet test;
};

/// Splits `data` into disjoint train/val/test folds by a seeded shuffle.
///
/// Rounding: train and val sizes are floor(fraction * n); the test fold
/// absorbs the remaining examples. Throws DataError if any fold rounds to
/// zero. Deterministic given spec.seed.
DataSplit split_dataset(const SampleSet& data, const SplitSpec& spec);

}  // namespace subshift
