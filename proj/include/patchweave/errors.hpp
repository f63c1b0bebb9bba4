#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace patchweave {

/// Bad argument to a single operation (negative sigma, non-positive width, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent inputs: shape mismatch, pyramid deeper than the image allows, ...
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric was requested over a region with no pixels.
class EmptyRegionError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// A pixel has no admissible candidate patch center inside its search window.
class EmptyCandidateSetError : public std::runtime_error {
 public:
  EmptyCandidateSetError(int row, int col)
      : std::runtime_error("no candidate patch centers in search window of pixel (" +
                           std::to_string(row) + ", " + std::to_string(col) + ")"),
        row_(row),
        col_(col) {}

  int row() const noexcept { return row_; }
  int col() const noexcept { return col_; }

 private:
  int row_;
  int col_;
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
  SolverError(const std::string& what, int row, int col)
      : std::runtime_error(what + " at pixel (" + std::to_string(row) + ", " +
                           std::to_string(col) + ")"),
        row_(row),
        col_(col) {}

  /// -1 when the failure is not tied to a pixel.
  int row() const noexcept { return row_; }
  int col() const noexcept { return col_; }

 private:
  int row_ = -1;
  int col_ = -1;
};

}  // namespace patchweave
