// Copyright 2026 the qnm authors
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

namespace qnm {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix/vector size mismatch.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violated one of the documented invariants (non-Hermitian input,
/// trace drift, negative eigenvalue beyond tolerance, ...).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// A configuration or argument value is invalid; carries the field name.
class ParameterError : public Error {
 public:
  ParameterError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Requested evaluation too close to a pole of the generator rate
/// (tau_s = pi/4 + k*pi/2). Carries the nearest singular time.
class SingularityError : public Error {
 public:
  SingularityError(double tau, double nearest, const std::string& what)
      : Error(what + " (tau = " + std::to_string(tau) +
              ", nearest singular tau = " + std::to_string(nearest) + ")"),
        tau_(tau),
        nearest_(nearest) {}
  double tau() const { return tau_; }
  double nearest_singular() const { return nearest_; }

 private:
  double tau_;
  double nearest_;
};

/// An iterative estimate failed to settle within its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Step or iteration budget exhausted.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Nothing left to operate on (e.g. every grid point was excluded).
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace qnm
