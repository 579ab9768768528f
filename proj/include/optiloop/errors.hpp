// Copyright 2026 The OptiLoop Authors
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

#ifndef OPTILOOP_ERRORS_HPP
#define OPTILOOP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace optiloop {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The scenario violates a structural invariant (bad references, negative
/// capacities, unattached endpoints, ...).
class ScenarioInvalid : public Error {
 public:
  using Error::Error;
};

/// The chi graph of some endpoint contains a cycle.
class CyclicLogicalGraph : public ScenarioInvalid {
 public:
  using ScenarioInvalid::ScenarioInvalid;
};

/// A configuration does not match the dimensions of its scenario.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// Attempt to fix or relax a variable that is not a binary decision.
class InvalidMode : public Error {
 public:
  using Error::Error;
};

/// The simplex method hit its iteration cap without converging.
class SolverStall : public Error {
 public:
  using Error::Error;
};

/// compute_iis() was called on a feasible problem.
class NotInfeasible : public Error {
 public:
  using Error::Error;
};

/// No configuration of the instance can carry its demand.
class InstanceInfeasible : public Error {
 public:
  using Error::Error;
};

/// The repair loop activated more elements than its cap allows.
class RepairDiverged : public Error {
 public:
  using Error::Error;
};

/// An enumeration exceeded its budget of LP solves.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// The synthetic generator could not produce a valid scenario.
class GenerationFailed : public Error {
 public:
  using Error::Error;
};

/// Metrics were requested against a baseline that has no feasible result.
class BaselineMissing : public Error {
 public:
  using Error::Error;
};

/// Malformed input document. Line and column are 1-based; zero when the
/// error is semantic rather than syntactic.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace optiloop

#endif  // OPTILOOP_ERRORS_HPP
