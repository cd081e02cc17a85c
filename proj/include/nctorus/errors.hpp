#pragma once

#include <stdexcept>
#include <string>

namespace nct {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary operation on elements carrying different theta values.
class IncompatibleElements : public Error {
 public:
  using Error::Error;
};

/// Element does not satisfy tau(a) = 1 where that normalization is required.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NotSelfAdjoint : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Spectrum touches (or crosses) the eigenvalue floor.
class PositivityError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Enumeration size exceeds a configured cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Malformed element / coefficient file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace nct
