/// @file dataset_io.hpp
/// @brief Plain-text dataset format.
///
/// Layout:
///   line 1:  d,C           (C = -1 when the set is unlabeled)
///   line k:  class_label,subgroup_tag,v_1,...,v_d
/// with -1 encoding absent labels/tags. Values are shortest round-trip
/// decimals, so write(read(f)) == f byte for byte.

#pragma once

#include <filesystem>
#include <string>

#include "subshift/types.hpp"

namespace subshift {

void write_dataset(const std::filesystem::path& path, const SampleSet& set);

/// Reads a dataset file. `provenance` names the pool (used for fold
/// hygiene); per-example origins are derived from it and the row index.
SampleSet read_dataset(const std::filesystem::path& path, const std::string& provenance);

/// FNV-1a of a string; used to give loaded pools a stable origin namespace.
std::uint64_t provenance_hash(const std::string& s) noexcept;

}  // namespace subshift
