// Copyright 2026 The rpdp Authors
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

#ifndef RPDP_ERRORS_H_
#define RPDP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace rpdp {

// Base class for every error raised by the library. Each subclass maps to a
// distinct process exit code in the command-line tool.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the mathematical domain of an operation
// (e.g. sigma <= 0, q outside [0, 1]).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or unknown configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The exponential curve fit could not be computed.
class FitError : public Error {
 public:
  using Error::Error;
};

// Bad input data: malformed CSV rows, missing columns, empty files.
class DataError : public Error {
 public:
  using Error::Error;
};

// An internal invariant was breached (ledger overspend, non-finite
// gradients, charge without precheck). Should be unreachable.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace rpdp

#endif  // RPDP_ERRORS_H_
