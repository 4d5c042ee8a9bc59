#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fsda {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed sparse structure: out-of-range index, duplicate entry, bad offsets.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Operand sizes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A documented precondition on an argument is violated (k out of range,
// alpha = 0 for SA-SDA, single-class evaluation set, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents.
class ParseError : public Error {
 public:
  using Error::Error;
};

// The file system refused a read or write.
class IoError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf appeared inside an iteration.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// <p, Bp> vanished (or a 2x2 projected pencil is singular).
class BreakdownError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Throws DimensionError naming `what` unless expected == actual.
void check_dimension(std::string_view what, std::size_t expected, std::size_t actual);

}  // namespace fsda
