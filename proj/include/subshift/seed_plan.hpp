/// @file seed_plan.hpp
/// @brief Fixed seed-derivation branches under a run's root seed, shared by
/// the CLI commands and the sweeps so that overlapping work (same data, same
/// training inputs) reproduces bit-identically across entry points.

#pragma once

#include <cstdint>

#include "subshift/power.hpp"
#include "subshift/rng.hpp"

namespace subshift::harness::seed_plan {

inline constexpr std::uint64_t kData = 10;       // pool generation
inline constexpr std::uint64_t kTaskNet = 11;    // task classifier training
inline constexpr std::uint64_t kDomainNet = 12;  // domain classifier training
inline constexpr std::uint64_t kKernel = 13;     // deep kernel training
inline constexpr std::uint64_t kSubsample = 15;  // training-size sweep subsampling

inline TrainSeeds train_seeds(std::uint64_t root_seed) {
  TrainSeeds s;
  s.task = derive_seed(root_seed, {kTaskNet});
  s.domain = derive_seed(root_seed, {kDomainNet});
  s.kernel = derive_seed(root_seed, {kKernel});
  return s;
}

}  // namespace subshift::harness::seed_plan
