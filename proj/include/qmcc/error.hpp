// Copyright 2026 The qmcc developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>

namespace qmcc {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Register or qubit-count limit violated.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Qubit index out of range, duplicated, or colliding with a target.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Dimension or arity mismatch between containers.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value or invalid numeric parameter.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Dataset cannot satisfy a request (missing samples, bad labels, I/O).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Decomposed circuit failed to reproduce its reference.
class AuditError : public Error {
 public:
  using Error::Error;
};

}  // namespace qmcc
