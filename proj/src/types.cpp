#include "subshift/types.hpp"

#include <cmath>

#include "subshift/errors.hpp"

namespace subshift {

void SampleSet::validate() const {
  if (dimension < 1) throw ShapeError("SampleSet: dimension must be >= 1");
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Example& ex = examples[i];
    if (ex.features.size() != dimension) {
      throw ShapeError("SampleSet: example " + std::to_string(i) + " has dimension " +
                       std::to_string(ex.features.size()) + ", expected " +
                       std::to_string(dimension));
    }
    if (!ex.features.allFinite()) {
      throw DataError("SampleSet: example " + std::to_string(i) + " has non-finite entries");
    }
    if (ex.class_label != kNoLabel) {
      if (ex.class_label < 0 || (class_count != kNoLabel && ex.class_label >= class_count)) {
        throw DataError("SampleSet: example " + std::to_string(i) + " has class label " +
                        std::to_string(ex.class_label) + " outside [0, " +
                        std::to_string(class_count) + ")");
      }
    }
  }
}

Eigen::MatrixXd SampleSet::feature_matrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(examples.size()), dimension);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = examples[i].features.transpose();
  }
  return m;
}

void SplitSpec::validate() const {
  auto in_open_unit = [](double f) { return f > 0.0 && f < 1.0; };
  if (!in_open_unit(train_fraction) || !in_open_unit(val_fraction) ||
      !in_open_unit(test_fraction)) {
    throw ConfigError("SplitSpec: each fraction must lie in (0,1)");
  }
  const double sum = train_fraction + val_fraction + test_fraction;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("SplitSpec: fractions sum to " + std::to_string(sum) + ", expected 1");
  }
}

}  // namespace subshift
