#pragma once
#include <stdexcept>
#include <string>

namespace sg {

// Error taxonomy shared by the library and the CLI.
// Exit codes: 0 ok, 2 usage, 3 domain (bad address / out of range),
// 4 numeric (non-convergence, step-cap hit), 5 resource (size caps).

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : Error {
  using Error::Error;
  static constexpr int exit_code = 2;
};

struct DomainError : Error {
  using Error::Error;
  static constexpr int exit_code = 3;
};

struct NumericError : Error {
  using Error::Error;
  static constexpr int exit_code = 4;
};

struct ResourceError : Error {
  using Error::Error;
  static constexpr int exit_code = 5;
};

} // namespace sg
