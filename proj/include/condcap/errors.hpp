#pragma once

#include <stdexcept>
#include <string>

namespace condcap {

// Bad user input: malformed scenario, invalid parameters, violated
// preconditions. The CLI maps this to exit code 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical breakdown that should be impossible for valid input
// (e.g. zero energy at nonzero mass). Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace condcap
