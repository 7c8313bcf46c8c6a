// Copyright 2026 The ssmtraj Authors
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

#ifndef SSMTRAJ_NUMCORE_ERRORS_HPP_
#define SSMTRAJ_NUMCORE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ssmtraj
{

/// Caller broke a documented precondition (shape mismatch, bad argument).
class ContractViolation : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

/// A factorization could not be completed, even after regularization.
class DecompositionError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure produced non-finite values. `stage()` names the
/// pipeline stage where it was detected.
class DivergenceError : public std::runtime_error
{
public:
  explicit DivergenceError(std::string stage, const std::string & what)
  : std::runtime_error(stage + ": " + what), stage_(std::move(stage))
  {
  }

  const std::string & stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

/// Malformed or incompatible on-disk data.
class FormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const char * message)
{
  if (!condition) {
    throw ContractViolation(message);
  }
}

inline void require(bool condition, const std::string & message)
{
  if (!condition) {
    throw ContractViolation(message);
  }
}

}  // namespace ssmtraj

#endif  // SSMTRAJ_NUMCORE_ERRORS_HPP_
