#pragma once

#include <stdexcept>
#include <string>

namespace mhrelay {

// Invalid user-facing configuration (bad field values, malformed specs).
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (non-convergent quadrature, unrecoverable cancellation,
// overflow in a series expansion). The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mhrelay
