#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fkdv {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mismatched sample/coefficient lengths.
struct DimensionError : Error {
    using Error::Error;
};

/// Invalid parameter value (negative exponent, zeta out of range, ...).
struct ParameterError : Error {
    using Error::Error;
};

/// Hermitian symmetry of a real field broken beyond tolerance.
struct SymmetryError : Error {
    using Error::Error;
};

/// Time step rejected by a stability guard.
struct StepSizeError : Error {
    using Error::Error;
};

/// Inner fixed-point iteration failed to converge; carries the residual history.
struct IterationDivergenceError : Error {
    std::vector<double> residual_history;
    IterationDivergenceError(const std::string& what, std::vector<double> residuals)
        : Error(what), residual_history(std::move(residuals)) {}
};

/// Characteristic solution queried at or past the gradient catastrophe.
struct MultivaluedError : Error {
    using Error::Error;
};

/// Scalar root finder failed to reach the requested residual.
struct RootFindError : Error {
    using Error::Error;
};

/// Initial datum has no negative slope; no gradient catastrophe exists.
struct NoBreakingError : Error {
    using Error::Error;
};

/// Theta series queried with a nome of modulus >= 1.
struct DivergentSeriesError : Error {
    using Error::Error;
};

/// Input outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

/// Malformed configuration or input file.
struct ConfigError : Error {
    using Error::Error;
};

/// Filesystem failure (open, write, rename).
struct IoError : Error {
    using Error::Error;
};

} // namespace fkdv
