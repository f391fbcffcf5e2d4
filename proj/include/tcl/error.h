// Copyright 2026 The tclab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TCL_ERROR_H_
#define TCL_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tcl {

// Base for every error raised by the library. Callers that only need a
// message catch this; the CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible tensor shapes. The message names both shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A precondition on values (not shapes) was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Bad user configuration; the message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t step)
      : Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// File-format or filesystem failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tcl

#endif  // TCL_ERROR_H_
