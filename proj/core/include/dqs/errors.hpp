#pragma once

#include <stdexcept>
#include <string>

namespace dqs {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Matrix input is malformed (non-finite entries, bad dimension).
struct InvalidMatrix : Error {
  using Error::Error;
};

/// Generic argument violation (dimension mismatch, empty input, bad range).
struct InvalidInput : Error {
  using Error::Error;
};

/// Probability or state model violates its own contract.
struct InvalidModel : Error {
  using Error::Error;
};

/// An outcome probability vanishes while its gradient does not; the Fisher
/// sum diverges at this parameter point.
struct SingularOutcome : Error {
  using Error::Error;
};

/// Numerical rank changed across a perturbation sweep at the given threshold.
struct RankInstability : Error {
  using Error::Error;
};

/// Phase scan carries too little variation to identify a visibility.
struct FitDegenerate : Error {
  using Error::Error;
};

/// No counts available where the estimator needs them.
struct InsufficientData : Error {
  using Error::Error;
};

/// Malformed file content (CSV/JSON).
struct ParseError : Error {
  using Error::Error;
};

}  // namespace dqs
