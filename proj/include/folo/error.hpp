#pragma once

#include <stdexcept>
#include <string>

namespace folo {

// Single exception type for all input and numeric failures. Non-convergence
// of iterative solvers is reported through result fields, never thrown.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace folo
