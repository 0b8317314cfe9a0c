// Copyright 2026 The Grounding Authors.
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

#ifndef GROUNDING_ERROR_H_
#define GROUNDING_ERROR_H_

#include <stdexcept>
#include <string>

namespace grounding {

// Base class for every error raised by the library. `kind()` is a short
// stable identifier suitable for machine-readable reporting.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string &message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string &kind() const { return kind_; }

 private:
  std::string kind_;
};

// Input file could not be parsed or violates a format invariant.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string &message)
      : Error("parse", message) {}
};

// Arguments violate an operation's precondition.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string &message)
      : Error("invalid_argument", message) {}
};

}  // namespace grounding

#endif  // GROUNDING_ERROR_H_
