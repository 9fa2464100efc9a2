// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_ERROR_HPP
#define PRAC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace prac {

// Error taxonomy maps onto CLI exit codes: usage -> 1, data -> 2, numeric -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed inputs: bad labels, shape mismatches, invalid configuration.
struct InputError : Error {
  using Error::Error;
};

// Broken files and formats: truncated streams, wrong magic, parse failures.
struct DataError : Error {
  using Error::Error;
};

// Non-finite values produced by forward/backward/step.
struct NumericError : Error {
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}

}  // namespace prac

#endif  // PRAC_ERROR_HPP
