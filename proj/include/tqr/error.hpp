#pragma once

#include <stdexcept>
#include <string>

namespace tqr {

// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Broken preconditions: shape mismatches, out-of-range indices, empty inputs.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent external input (files, configs, records).
class InputError : public Error {
 public:
  using Error::Error;
};

// Non-finite values during training or optimization.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace tqr
