#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ratfn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A search or construction ran past its configured limit.
class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& what, std::size_t budget)
      : Error(what + " exceeded its budget of " + std::to_string(budget)), budget_(budget) {}
  std::size_t budget() const { return budget_; }

 private:
  std::size_t budget_;
};

class ElementBudgetExceeded : public BudgetExceeded {
 public:
  explicit ElementBudgetExceeded(std::size_t budget)
      : BudgetExceeded("transition monoid closure", budget) {}
};

class IncompatiblePartition : public Error {
 public:
  using Error::Error;
};

class IncompatibleMorphism : public Error {
 public:
  using Error::Error;
};

class NotFunctionalInput : public Error {
 public:
  using Error::Error;
};

class NotCoaccessible : public Error {
 public:
  using Error::Error;
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

class TransitivityViolation : public Error {
 public:
  using Error::Error;
};

class NotComplete : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ratfn
