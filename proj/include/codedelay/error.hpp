#pragma once

#include <stdexcept>
#include <string>

namespace codedelay {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violations on user-supplied parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Truncation horizons exceeded, stalled simulations, degenerate chains.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace codedelay
