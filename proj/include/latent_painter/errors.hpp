#pragma once

#include <stdexcept>
#include <string>

namespace latent_painter {

/// Caller passed arguments that violate an operation's contract.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition did not hold (e.g. picking a stroke from an empty region).
struct PreconditionViolation : std::logic_error {
  using std::logic_error::logic_error;
};

/// Input data parsed but failed semantic validation (NaN payload, bad rank, non-monotone log).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed file contents (bad magic, unparseable header).
struct FormatError : ValidationError {
  using ValidationError::ValidationError;
};

/// The canvas already matches the snapshot, so there is no mass to take a center of.
struct NoCenterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace latent_painter
