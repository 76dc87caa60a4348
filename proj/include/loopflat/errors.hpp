#pragma once

#include <stdexcept>
#include <string>

namespace loopflat {

// Exit-code convention used by the CLI:
//   0 success, 1 verification failure, 2 configuration error, 3 numerical failure.

/// Bad user input: unknown case key, unsupported size, malformed config.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A checked invariant or golden value failed.
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown: degeneracy, search failure, truncation floor not reached.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested subspace dimension exceeds the rank of the secondary symmetric space.
/// This is the rank obstruction, not a numerical failure.
struct ObstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Loop outside the dense factorization domain (block-Toeplitz system singular).
struct BigCellError : NumericalError {
  using NumericalError::NumericalError;
};

/// Residual floor not reached at the maximum truncation degree.
struct TruncationError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace loopflat
