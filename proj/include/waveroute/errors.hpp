// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace waveroute {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument value (non-positive pitch, bad FractalSpec field, unknown id).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Geometrically degenerate input, e.g. coincident bend endpoints.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Broken circuit topology: cycles, dangling references, missing ports.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A generator could not produce a layout that passes validation.
class GenerationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace waveroute
