// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hamfactor {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, out-of-range indices, inconsistent arguments.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ValidationError {
 public:
  ParseError(int line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// The numerics went somewhere they should not (non-finite cost, broken
/// positivity assumptions, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonPSDTensor : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InvalidShiftSplit : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace hamfactor
