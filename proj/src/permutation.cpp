#include "subshift/permutation.hpp"

#include <numeric>

#include "subshift/errors.hpp"
#include "subshift/rng.hpp"

namespace subshift::stats {

void PermutationConfig::validate() const {
  if (n_permutations < 19) throw ConfigError("PermutationConfig: n_permutations must be >= 19");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("PermutationConfig: alpha must lie in (0,1)");
}

TestOutcome permutation_test_indexed(const IndexedStatistic& statistic, std::size_t m,
                                     const PermutationConfig& cfg) {
  cfg.validate();
  if (m < 1) throw ShapeError("permutation_test: empty samples");
  const std::size_t n = 2 * m;

  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  const std::span<const std::size_t> ident(identity);
  const double t_obs = statistic(ident.subspan(0, m), ident.subspan(m, m));

  int count_ge = 0;
  std::vector<std::size_t> perm(n);
  for (int b = 0; b < cfg.n_permutations; ++b) {
    perm = identity;
    Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(b)}));
    rng.shuffle(perm);
    const std::span<const std::size_t> ps(perm);
    const double t_perm = statistic(ps.subspan(0, m), ps.subspan(m, m));
    if (t_perm >= t_obs) ++count_ge;
  }

  TestOutcome out;
  out.statistic = t_obs;
  out.p_value = double(1 + count_ge) / double(1 + cfg.n_permutations);
  out.reject = out.p_value <= cfg.alpha;
  out.m = m;
  out.alpha = cfg.alpha;
  out.n_permutations = cfg.n_permutations;
  out.seed = cfg.seed;
  return out;
}

TestOutcome permutation_test(const SampleStatistic& statistic, const SampleSet& x,
                             const SampleSet& y, const PermutationConfig& cfg) {
  if (x.size() != y.size()) {
    throw ShapeError("permutation_test: sample sizes differ (" + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()) + ")");
  }
  if (x.dimension != y.dimension) throw ShapeError("permutation_test: dimensions differ");
  const std::size_t m = x.size();

  std::vector<const Example*> pool;
  pool.reserve(2 * m);
  for (const Example& ex : x.examples) pool.push_back(&ex);
  for (const Example& ex : y.examples) pool.push_back(&ex);

  auto materialize = [&](std::span<const std::size_t> idx, const SampleSet& like) {
    SampleSet s;
    s.dimension = like.dimension;
    s.class_count = like.class_count;
    s.examples.reserve(idx.size());
    for (std::size_t i : idx) s.examples.push_back(*pool[i]);
    return s;
  };

  return permutation_test_indexed(
      [&](std::span<const std::size_t> xi, std::span<const std::size_t> yi) {
        return statistic(materialize(xi, x), materialize(yi, y));
      },
      m, cfg);
}

}  // namespace subshift::stats
