// Copyright 2026 The LPE Authors.
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

#ifndef LPE_ERROR_HPP_
#define LPE_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lpe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied inputs that violate an operation's preconditions
/// (bad parameter ranges, dimension mismatches, malformed files).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Inputs were well formed but the computation cannot produce a result.
class ComputationError : public Error {
 public:
  using Error::Error;
};

/// The geodesic neighborhood graph splits into several components, so some
/// pairs have no finite path between them.
class DisconnectedGraphError : public ComputationError {
 public:
  DisconnectedGraphError(std::string what, std::vector<std::vector<std::size_t>> components)
      : ComputationError(std::move(what)), components_(std::move(components)) {}

  /// Point indices grouped by component, each group sorted ascending.
  const std::vector<std::vector<std::size_t>>& components() const { return components_; }

 private:
  std::vector<std::vector<std::size_t>> components_;
};

}  // namespace lpe

#endif  // LPE_ERROR_HPP_
