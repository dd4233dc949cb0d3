#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace finsler {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotSquare : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct ZeroVector : Error { using Error::Error; };
struct SingularGradient : Error { using Error::Error; };
struct SingularMatrix : Error { using Error::Error; };
struct TooFewSamples : Error { using Error::Error; };
struct OutOfDomain : Error { using Error::Error; };
struct DegenerateGradient : Error { using Error::Error; };
struct UnsupportedNorm : Error { using Error::Error; };
struct NotHarmonic : Error { using Error::Error; };

/// Thrown by the CLI mini-language parsers; carries the offset of the
/// character that could not be consumed.
struct ParseError : Error {
  std::size_t position;
  ParseError(const std::string& what, std::size_t pos)
      : Error(what + " at position " + std::to_string(pos)), position(pos) {}
};

}  // namespace finsler
