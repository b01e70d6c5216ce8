#pragma once

#include <stdexcept>
#include <string>

namespace cvxrich {

// Rejected input: malformed data, out-of-range parameters, violated
// preconditions. The CLI maps these to exit status 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to meet its own certificate (iteration cap,
// KKT violation). The CLI maps these to exit status 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cvxrich
