#include "subshift/sampling.hpp"

#include "subshift/errors.hpp"
#include "subshift/rng.hpp"

namespace subshift {

SampleSet draw_with_replacement(const SampleSet& pool, std::size_t m, std::uint64_t seed) {
  if (pool.empty()) throw DataError("draw_with_replacement: pool is empty");
  if (m < 1) throw DataError("draw_with_replacement: m must be >= 1");

  Rng rng(seed);
  SampleSet out;
  out.dimension = pool.dimension;
  out.class_count = pool.class_count;
  out.provenance = pool.provenance;
  out.examples.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.examples.push_back(pool.examples[rng.uniform_int(pool.size())]);
  }
  return out;
}

}  // namespace subshift
