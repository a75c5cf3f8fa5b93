/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace lipi {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: missing files, malformed records, invalid configuration.
/// The CLI maps these to exit code 2; everything else exits 1.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace lipi
