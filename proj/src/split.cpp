#include "subshift/split.hpp"

#include <cmath>
#include <numeric>

#include "subshift/errors.hpp"
#include "subshift/rng.hpp"

namespace subshift {

DataSplit split_dataset(const SampleSet& data, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = data.size();
  if (n == 0) throw DataError("split_dataset: input is empty");

  const auto n_train = static_cast<std::size_t>(std::floor(spec.train_fraction * double(n)));
  const auto n_val = static_cast<std::size_t>(std::floor(spec.val_fraction * double(n)));
  if (n_train + n_val > n) throw DataError("split_dataset: fractions overflow dataset");
  const std::size_t n_test = n - n_train - n_val;
  if (n_train == 0 || n_val == 0 || n_test == 0) {
    throw DataError("split_dataset: fractions too small for dataset of size " +
                    std::to_string(n) + " (fold sizes " + std::to_string(n_train) + "/" +
                    std::to_string(n_val) + "/" + std::to_string(n_test) + ")");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed);
  rng.shuffle(order);

  auto take = [&](std::size_t begin, std::size_t count, const char* tag) {
    SampleSet fold;
    fold.dimension = data.dimension;
    fold.class_count = data.class_count;
    fold.provenance = data.provenance.empty() ? tag : data.provenance + "/" + tag;
    fold.examples.reserve(count);
    for (std::size_t i = begin; i < begin + count; ++i) {
      fold.examples.push_back(data.examples[order[i]]);
    }
    return fold;
  };

  DataSplit out;
  out.train = take(0, n_train, "train");
  out.val = take(n_train, n_val, "val");
  out.test = take(n_train + n_val, n_test, "test");
  return out;
}

}  // namespace subshift
