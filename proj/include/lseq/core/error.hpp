#pragma once

#include <stdexcept>
#include <string>

namespace lseq {

// Base class for all recoverable failures raised by the library. Callers that
// only care about "did it work" can catch std::runtime_error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace lseq
