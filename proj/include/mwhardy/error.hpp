#pragma once

#include <stdexcept>
#include <string>

namespace mwhardy {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented invariant of an input value does not hold (e.g. a non-Hermitian matrix).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// A weight sample (or derived matrix) is singular at working precision.
class SingularWeightError : public Error {
public:
    using Error::Error;
};

/// Geometric precondition violated (empty or full open set, cube outside the domain, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Requested scale or truncation is below what the sampling grid resolves.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// A scale is not aligned with the sampling grid.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// A numerical construction failed its own validation.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// A weighted inner product is too ill-conditioned to build an orthonormal basis.
class DegenerateMeasureError : public Error {
public:
    using Error::Error;
};

/// Caller-side precondition violated.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration document.
class SchemaError : public Error {
public:
    using Error::Error;
};

} // namespace mwhardy
