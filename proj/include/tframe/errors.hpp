#pragma once

#include <stdexcept>
#include <string>

namespace tframe {

// Bad arguments, dimension mismatches, malformed files.
struct invalid_input : std::invalid_argument {
  explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

// Mathematically well-formed input outside a function's domain.
struct out_of_domain : std::domain_error {
  explicit out_of_domain(const std::string& what) : std::domain_error(what) {}
};

// Work refused up front because it would exceed a configured budget.
struct budget_exceeded : std::runtime_error {
  explicit budget_exceeded(const std::string& what) : std::runtime_error(what) {}
};

// The requested question cannot be answered from the given evidence.
struct indeterminate_result : std::runtime_error {
  explicit indeterminate_result(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tframe
