#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace cimtune {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates an operation's precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// The input carries no information to work with (e.g. an all-zero matrix).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input document. `field` names the offending key.
class InputError : public Error {
 public:
  InputError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Some operation has no admissible start time under the horizon.
class InfeasibleHorizonError : public Error {
 public:
  using Error::Error;
};

/// A computation exceeded its size or node budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Branch-and-bound ran out of nodes before proving optimality.
class BudgetExhaustedError : public ResourceError {
 public:
  BudgetExhaustedError(const std::string& what, std::optional<int> incumbent, int bound)
      : ResourceError(what), incumbent_(incumbent), bound_(bound) {}
  std::optional<int> incumbent() const noexcept { return incumbent_; }
  int bound() const noexcept { return bound_; }

 private:
  std::optional<int> incumbent_;
  int bound_;
};

/// A decision policy failed to produce a valid decision.
class PolicyError : public Error {
 public:
  using Error::Error;
};

}  // namespace cimtune
