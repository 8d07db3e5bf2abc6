#pragma once

#include <stdexcept>
#include <string>

namespace paoi {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A distribution or system parameter is outside its domain.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The requested analysis does not exist for this model (e.g. exact PAoI
/// with non-exponential service).
class UnsupportedModelError : public Error {
public:
    using Error::Error;
};

/// Infinite-buffer model with total utilisation >= 1.
class StabilityError : public Error {
public:
    using Error::Error;
};

/// Singular solves, divergent formulas, degenerate denominators.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace paoi
