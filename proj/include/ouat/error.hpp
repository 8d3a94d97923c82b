#pragma once

#include <stdexcept>
#include <string>

namespace ouat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (non-finite input,
/// negative weight, mismatched lengths, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A config file or command line is malformed.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The supremum defining a convex conjugate is not attained within the
/// search budget.
class UnboundedConjugateError : public Error {
public:
    using Error::Error;
};

/// A measure charges a point outside the support of the reference measure.
class AbsoluteContinuityError : public Error {
public:
    using Error::Error;
};

/// Least-squares system could not be solved.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Bracketing or bisection ran out of budget.
class BracketError : public Error {
public:
    using Error::Error;
};

/// A hypothesis of an approximation theorem is violated by the inputs.
class HypothesisError : public Error {
public:
    HypothesisError(std::string hypothesis, const std::string& detail)
        : Error("hypothesis violated [" + hypothesis + "]: " + detail),
          hypothesis_(std::move(hypothesis)) {}

    const std::string& hypothesis() const noexcept { return hypothesis_; }

private:
    std::string hypothesis_;
};

/// An internal invariant failed. Always a bug.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace ouat
