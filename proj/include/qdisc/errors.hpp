// Copyright 2026 The qdisc Authors
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
#include <string>

namespace qdisc {

// Raised when a truncated representation drops more probability mass than
// the tolerance allows. The caller should enlarge the dimension or cap.
class TruncationError : public std::runtime_error {
 public:
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when the padded displacement exponential is not unitary enough on
// the retained block.
class PaddingError : public std::runtime_error {
 public:
  explicit PaddingError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by state constructors when the PSD / trace / symmetry checks fail.
class InvalidStateError : public std::runtime_error {
 public:
  explicit InvalidStateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qdisc
