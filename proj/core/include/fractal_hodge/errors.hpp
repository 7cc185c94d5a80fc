#pragma once

#include <stdexcept>
#include <string>

namespace fractal_hodge {

/// Invalid parameters or mismatched shapes (degree, generation, length).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Construction refused because it would exceed the configured simplex cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical invariant that must hold was found violated at runtime.
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input documents (graph JSON, Matrix Market, form files).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fractal_hodge
