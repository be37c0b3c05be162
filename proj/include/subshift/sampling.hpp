#pragma once

#include <cstdint>

#include "subshift/types.hpp"

namespace subshift {

/// Draws `m` examples uniformly with replacement from `pool`.
/// Deterministic given `seed`; origins travel with the drawn examples.
SampleSet draw_with_replacement(const SampleSet& pool, std::size_t m, std::uint64_t seed);

}  // namespace subshift
