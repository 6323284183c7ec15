#pragma once

#include <stdexcept>
#include <string>

namespace landrl {

// Invalid or inconsistent configuration (bad layer spec, zero capacity, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Dimension mismatch between tensors or between data and a declared shape.
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// NaN/Inf encountered where finiteness is required.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Operation called in a state that does not admit it (step after terminal,
// seeding a non-empty buffer, ...).
struct StateError : std::runtime_error {
  explicit StateError(const std::string& what) : std::runtime_error(what) {}
};

// Request for more samples than the source holds.
struct InsufficientDataError : std::runtime_error {
  explicit InsufficientDataError(const std::string& what)
      : std::runtime_error(what) {}
};

// File or stream failure.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace landrl
