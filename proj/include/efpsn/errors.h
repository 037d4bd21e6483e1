// Copyright 2026 The EFPSN Authors
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

#ifndef EFPSN_ERRORS_H_
#define EFPSN_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace efpsn {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied parameters or configuration. The CLI maps this to
// exit code 1; every other Error maps to 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The communication graph has more than one connected component.
class DisconnectedGraph : public Error {
 public:
  using Error::Error;
};

// A signed plaintext does not fit in (-f/2, f/2).
class PlaintextOverflow : public Error {
 public:
  using Error::Error;
};

// Ciphertexts or keys from different keypairs were combined.
class KeyMismatch : public Error {
 public:
  using Error::Error;
};

// Key generation exhausted its retry budget.
class KeyGenerationFailure : public Error {
 public:
  using Error::Error;
};

// An iterative method left its divergence guard.
class Divergence : public Error {
 public:
  using Error::Error;
};

// A pipeline stage failed; the message names the stage and the cause.
class StageFailure : public Error {
 public:
  StageFailure(std::string stage, const std::string& cause)
      : Error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace efpsn

#endif  // EFPSN_ERRORS_H_
