#pragma once

#include <stdexcept>
#include <string>

namespace ctst {

// Invalid input or configuration (bad files, shape mismatches, precondition
// violations). The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (singular block system, non-finite objective, ...).
// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ctst
