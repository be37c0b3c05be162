#pragma once

#include <stdexcept>
#include <string>

namespace subshift {

/// Invalid or rejected configuration (bad schema, unknown keys, bad values).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Data-level problems: missing labels, malformed dataset rows, empty folds.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Dimension or sample-size mismatches between inputs.
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

/// Required input files or directories are absent.
struct MissingInputError : std::runtime_error {
  explicit MissingInputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace subshift
