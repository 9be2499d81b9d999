#pragma once

#include <stdexcept>
#include <string>

namespace tmwave {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A factorization hit a zero or negative pivot; the matrix is not
/// positive definite (or is numerically singular on the LDLT path).
struct NotPositiveDefiniteError : Error {
    using Error::Error;
};

struct DimensionMismatchError : Error {
    using Error::Error;
};

/// A weight or load function evaluated to NaN/Inf at a quadrature point.
struct NonFiniteWeightError : Error {
    using Error::Error;
};

struct OutOfDomainError : Error {
    using Error::Error;
};

/// build_mesh cannot honor the required vertices with the requested
/// element budget.
struct TooFewElementsError : Error {
    using Error::Error;
};

/// A manufactured coefficient model was asked for the time derivative of
/// 1/kappa but was constructed without one.
struct MissingDerivativeError : Error {
    using Error::Error;
};

/// Reference-solution comparison requires nested meshes.
struct NotNestedError : Error {
    using Error::Error;
};

/// Rate fitting with a non-positive error value (exact representation).
struct DegenerateFitError : Error {
    using Error::Error;
};

/// Time stepping blew past the amplitude guard; usually a CFL violation.
struct DivergedError : Error {
    DivergedError(const std::string& what, int step) : Error(what), step_index(step) {}
    int step_index;
};

/// select_gamma exhausted its doubling budget.
struct GammaSearchFailedError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

}  // namespace tmwave
