#include "subshift/synth.hpp"

#include <algorithm>
#include <cmath>

#include "subshift/errors.hpp"
#include "subshift/rng.hpp"

namespace subshift::synth {

namespace {

int image_side(Eigen::Index dim) {
  const int side = static_cast<int>(std::lround(std::sqrt(double(dim))));
  if (side < 1 || Eigen::Index(side) * side != dim) {
    throw ShapeError("image dimension " + std::to_string(dim) + " is not a perfect square");
  }
  return side;
}

void occlude_with(FeatureVector& img, const CorruptionSpec& spec, Rng& rng) {
  const int side = image_side(img.size());
  const double frac = rng.uniform_range(spec.rect_min_frac, spec.rect_max_frac);
  const int rect = std::clamp(static_cast<int>(std::lround(frac * side)), 1, side);
  const int top = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(side - rect + 1)));
  const int left = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(side - rect + 1)));
  for (int r = top; r < top + rect; ++r) {
    for (int c = left; c < left + rect; ++c) {
      img[r * side + c] = spec.fill_value;
    }
  }
}

}  // namespace

void PatternSpec::validate() const {
  if (side_length < 4) throw ConfigError("PatternSpec: side_length must be >= 4");
  if (class_count < 2) throw ConfigError("PatternSpec: class_count must be >= 2");
  if (noise_sigma < 0.0) throw ConfigError("PatternSpec: noise_sigma must be >= 0");
}

void CorruptionSpec::validate() const {
  if (probability < 0.0 || probability > 1.0) {
    throw ConfigError("CorruptionSpec: probability must lie in [0,1]");
  }
  if (rect_min_frac <= 0.0 || rect_max_frac > 1.0 || rect_min_frac > rect_max_frac) {
    throw ConfigError("CorruptionSpec: need 0 < rect_min_frac <= rect_max_frac <= 1");
  }
  if (fill_value < 0.0 || fill_value > 1.0) {
    throw ConfigError("CorruptionSpec: fill_value must lie in [0,1]");
  }
}

void ShiftScenario::validate() const {
  if (source_p < 0.0 || source_p > 1.0 || target_p < 0.0 || target_p > 1.0) {
    throw ConfigError("ShiftScenario: probabilities must lie in [0,1]");
  }
  if (oversample_w < 1.0) throw ConfigError("ShiftScenario: oversample_w must be >= 1");
  if (source_p != target_p && oversample_w > 1.0) {
    throw ConfigError("ShiftScenario: choose one mechanism, probability change or oversampling");
  }
}

std::vector<FeatureVector> build_prototypes(const PatternSpec& pattern) {
  pattern.validate();
  const int side = pattern.side_length;
  const Eigen::Index dim = Eigen::Index(side) * side;
  std::vector<FeatureVector> protos;
  protos.reserve(static_cast<std::size_t>(pattern.class_count));

  for (int c = 0; c < pattern.class_count; ++c) {
    Rng rng(derive_seed(pattern.prototype_seed, {static_cast<std::uint64_t>(c)}));
    FeatureVector raw(dim);
    for (Eigen::Index i = 0; i < dim; ++i) raw[i] = rng.uniform();

    // 3x3 box blur (clamped borders) to get contiguous blobs, then a median
    // threshold so every class lights up about half its pixels.
    FeatureVector smooth(dim);
    for (int r = 0; r < side; ++r) {
      for (int col = 0; col < side; ++col) {
        double acc = 0.0;
        int cnt = 0;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = r + dr, cc = col + dc;
            if (rr < 0 || rr >= side || cc < 0 || cc >= side) continue;
            acc += raw[rr * side + cc];
            ++cnt;
          }
        }
        smooth[r * side + col] = acc / cnt;
      }
    }

    std::vector<double> sorted(smooth.data(), smooth.data() + dim);
    std::nth_element(sorted.begin(), sorted.begin() + dim / 2, sorted.end());
    const double median = sorted[static_cast<std::size_t>(dim / 2)];

    FeatureVector proto(dim);
    for (Eigen::Index i = 0; i < dim; ++i) proto[i] = smooth[i] > median ? 0.9 : 0.1;
    protos.push_back(std::move(proto));
  }
  return protos;
}

SampleSet generate_dataset(std::size_t n, const PatternSpec& pattern,
                           const CorruptionSpec& corruption, std::uint64_t seed,
                           const std::string& provenance) {
  pattern.validate();
  corruption.validate();
  if (n < 1) throw DataError("generate_dataset: n must be >= 1");

  const auto protos = build_prototypes(pattern);
  const Eigen::Index dim = protos.front().size();

  SampleSet set;
  set.dimension = dim;
  set.class_count = pattern.class_count;
  set.provenance = provenance;
  set.examples.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t ex_seed = derive_seed(seed, {static_cast<std::uint64_t>(i)});
    Rng rng(ex_seed);

    Example ex;
    ex.origin = ex_seed;
    ex.class_label = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(pattern.class_count)));
    ex.features = protos[static_cast<std::size_t>(ex.class_label)];
    for (Eigen::Index px = 0; px < dim; ++px) {
      ex.features[px] = std::clamp(ex.features[px] + pattern.noise_sigma * rng.normal(), 0.0, 1.0);
    }
    if (rng.bernoulli(corruption.probability)) {
      ex.subgroup_tag = 1;
      occlude_with(ex.features, corruption, rng);
    } else {
      ex.subgroup_tag = 0;
    }
    set.examples.push_back(std::move(ex));
  }
  return set;
}

FeatureVector apply_occlusion(const FeatureVector& img, const CorruptionSpec& spec,
                              std::uint64_t seed) {
  spec.validate();
  FeatureVector out = img;
  Rng rng(seed);
  occlude_with(out, spec, rng);
  return out;
}

SampleSet oversample_subgroup(const SampleSet& pool, double w, std::uint64_t seed) {
  if (w < 1.0) throw ConfigError("oversample_subgroup: w must be >= 1");
  if (pool.empty()) throw DataError("oversample_subgroup: pool is empty");

  std::vector<std::size_t> tagged, untagged;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    (pool.examples[i].subgroup_tag == 1 ? tagged : untagged).push_back(i);
  }
  if (w > 1.0 && (tagged.empty() || untagged.empty())) {
    throw DataError("oversample_subgroup: pool must contain both subgroup tags when w > 1");
  }

  // Weighted draw: tagged examples carry weight w, others 1. Equivalent to
  // choosing the tagged side with probability w*n1 / (w*n1 + n0), then an
  // example uniformly within the chosen side.
  const double n1 = static_cast<double>(tagged.size());
  const double n0 = static_cast<double>(untagged.size());
  const double p_tagged = w * n1 / (w * n1 + n0);

  Rng rng(seed);
  SampleSet out;
  out.dimension = pool.dimension;
  out.class_count = pool.class_count;
  out.provenance = pool.provenance;
  out.examples.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!tagged.empty() && rng.bernoulli(p_tagged)) {
      out.examples.push_back(pool.examples[tagged[rng.uniform_int(tagged.size())]]);
    } else {
      out.examples.push_back(pool.examples[untagged[rng.uniform_int(untagged.size())]]);
    }
  }
  return out;
}

ShiftPair build_shift_pair(const ShiftScenario& scenario, const PatternSpec& pattern,
                           const CorruptionSpec& corruption, const PoolSizes& sizes,
                           std::uint64_t seed) {
  scenario.validate();

  auto gen = [&](std::size_t n, double p, std::uint64_t branch, std::uint64_t fold,
                 const std::string& name) {
    CorruptionSpec c = corruption;
    c.probability = p;
    return generate_dataset(n, pattern, c, derive_seed(seed, {branch, fold}), name);
  };

  ShiftPair pair;
  pair.p_train = gen(sizes.train, scenario.source_p, 0, 0, "P/train");
  pair.p_val = gen(sizes.val, scenario.source_p, 0, 1, "P/val");
  pair.p_test = gen(sizes.test, scenario.source_p, 0, 2, "P/test");

  if (scenario.uses_oversampling()) {
    pair.q_train = oversample_subgroup(gen(sizes.train, scenario.source_p, 1, 0, "Q/train"),
                                       scenario.oversample_w, derive_seed(seed, {2, 0}));
    pair.q_val = oversample_subgroup(gen(sizes.val, scenario.source_p, 1, 1, "Q/val"),
                                     scenario.oversample_w, derive_seed(seed, {2, 1}));
    pair.q_test = oversample_subgroup(gen(sizes.test, scenario.source_p, 1, 2, "Q/test"),
                                      scenario.oversample_w, derive_seed(seed, {2, 2}));
  } else {
    pair.q_train = gen(sizes.train, scenario.target_p, 1, 0, "Q/train");
    pair.q_val = gen(sizes.val, scenario.target_p, 1, 1, "Q/val");
    pair.q_test = gen(sizes.test, scenario.target_p, 1, 2, "Q/test");
  }
  return pair;
}

}  // namespace subshift::synth
