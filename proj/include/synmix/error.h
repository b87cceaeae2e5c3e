#pragma once

#include <stdexcept>
#include <string>

namespace synmix {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a documented type invariant or operation precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An iterative procedure (Newton, bisection, MCMC) failed to reach its target.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw InvalidArgument(message);
    }
}

}  // namespace synmix
