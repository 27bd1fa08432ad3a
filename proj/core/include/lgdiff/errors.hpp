//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <stdexcept>
#include <string>

namespace lgdiff {

// Base class for all lgdiff errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: bad sizes, invalid distributions, empty masks.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Tensor shape incompatibility in a primitive op.
class ShapeError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

// Input exceeds a documented size cap (canonical keys, MCES search).
class UnsupportedSizeError : public Error {
 public:
  using Error::Error;
};

// random_molecule exhausted its retry budget.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// Non-finite values, underflow, or other numerical aborts.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lgdiff
