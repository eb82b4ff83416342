#pragma once

#include <stdexcept>
#include <string>

namespace ftl {

// Input violates a documented precondition.
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation is undefined for the given input (empty sets and the like).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Enumeration would exceed the configured cell or word budget.
class budget_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A structural property that must hold by construction failed.
class invariant_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Reading or writing a file failed.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact arithmetic left the int64 range.
class overflow_error : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

}  // namespace ftl
