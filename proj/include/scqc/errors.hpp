#pragma once

#include <stdexcept>
#include <string>

namespace scqc {

/// Base for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed spec, out-of-range argument, empty grid.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Curve speed vanished somewhere on the domain.
class DegenerateCurveError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Integrator or solver failed (step underflow, non-convergence).
class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace scqc
