#pragma once

// =============================================================================
// Error taxonomy shared by all modules.
//
// Every failure surfaces as an exception rooted in mpe::Error so callers can
// distinguish caller mistakes (ArgumentError and subclasses) from numerical
// breakdown (OverflowError, SingularityError, InsufficientSignalError).
// =============================================================================

#include <stdexcept>
#include <string>

namespace mpe {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Caller passed an argument outside a function's documented domain.
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(what) {}
};

/// Operand shapes are incompatible (non-square matrix, length mismatch, ...).
class DimensionError : public ArgumentError {
public:
    explicit DimensionError(const std::string& what) : ArgumentError(what) {}
};

/// Extrapolation nodes collide or are otherwise degenerate.
class DegenerateNodeError : public ArgumentError {
public:
    explicit DegenerateNodeError(const std::string& what) : ArgumentError(what) {}
};

/// The requested operation needs a capability the object does not provide
/// (e.g. a full-exponential flow on a system that only defines split flows).
class CapabilityError : public ArgumentError {
public:
    explicit CapabilityError(const std::string& what) : ArgumentError(what) {}
};

/// A floating-point computation left the representable range.
class OverflowError : public Error {
public:
    explicit OverflowError(const std::string& what) : Error(what) {}
};

/// An operand must be evaluated at a pole of the underlying coefficient
/// function (division by zero, force evaluated on the singular set, ...).
class SingularityError : public Error {
public:
    explicit SingularityError(const std::string& what) : Error(what) {}
};

/// A fit was requested on data dominated by round-off; no slope is
/// recoverable above the noise floor.
class InsufficientSignalError : public Error {
public:
    explicit InsufficientSignalError(const std::string& what) : Error(what) {}
};

} // namespace mpe
