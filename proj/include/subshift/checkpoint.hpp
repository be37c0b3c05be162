/// @file checkpoint.hpp
/// @brief Flat binary model checkpoints.
///
/// Layout (little-endian throughout):
///   magic "SSMLP1\n" + NUL
///   u64 number of layer dims, then each dim as i64
///   per layer: weight matrix row-major as f64, then the bias vector as f64
/// The encoding has no platform-dependent padding, so files are byte-stable.

#pragma once

#include <filesystem>
#include <iosfwd>

#include "subshift/mlp.hpp"

namespace subshift::nn {

void write_mlp(std::ostream& os, const MlpParams& net);
MlpParams read_mlp(std::istream& is);

void save_mlp(const std::filesystem::path& path, const MlpParams& net);
MlpParams load_mlp(const std::filesystem::path& path);

}  // namespace subshift::nn
