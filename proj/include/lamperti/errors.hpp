#pragma once

#include <stdexcept>
#include <string>

namespace lamperti {

/// Raised when parameters or inputs violate a documented invariant.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an operation is not defined for the given chain family.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace lamperti
