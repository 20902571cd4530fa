#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace modelforge {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed profile text. Carries the byte offset of the failure and a
/// description of what the parser expected there.
class SyntaxError : public Error {
public:
    SyntaxError(std::string message, std::size_t position, std::string expected)
        : Error(std::move(message)), position_(position), expected_(std::move(expected)) {}
    std::size_t position() const noexcept { return position_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

/// Profile failed the evenness audit G(r) == G(-r).
class NotEvenError : public Error {
public:
    NotEvenError(std::string message, double sample_r, double mismatch)
        : Error(std::move(message)), sample_r_(sample_r), mismatch_(mismatch) {}
    double sample_r() const noexcept { return sample_r_; }
    double mismatch() const noexcept { return mismatch_; }

private:
    double sample_r_;
    double mismatch_;
};

class UnsupportedFunctionError : public Error {
public:
    using Error::Error;
};

/// Requested derivative order exceeds what the profile (or solution) supports.
class DerivativeUnavailableError : public Error {
public:
    using Error::Error;
};

/// Evaluation point outside the valid domain (table range, integrated span, ...).
class OutOfRangeError : public Error {
public:
    using Error::Error;
};

/// Adaptive step control collapsed below the representable step size.
class StepSizeUnderflowError : public Error {
public:
    StepSizeUnderflowError(std::string message, double t) : Error(std::move(message)), t_(t) {}
    double t() const noexcept { return t_; }

private:
    double t_;
};

/// The right-hand side produced a NaN or infinity.
class NonFiniteRhsError : public Error {
public:
    NonFiniteRhsError(std::string message, double t, std::vector<double> state)
        : Error(std::move(message)), t_(t), state_(std::move(state)) {}
    double t() const noexcept { return t_; }
    const std::vector<double>& state() const noexcept { return state_; }

private:
    double t_;
    std::vector<double> state_;
};

/// Radial coefficient requested outside its admissible interval.
class DomainExceededError : public Error {
public:
    using Error::Error;
};

/// Radius too close to the pole for the requested quantity.
class PoleSingularityError : public Error {
public:
    using Error::Error;
};

/// Check skipped because g'(r) vanishes at the requested radius.
class SkippedCriticalRadiusError : public Error {
public:
    using Error::Error;
};

class NotConstantProfileError : public Error {
public:
    using Error::Error;
};

class PathTooShortError : public Error {
public:
    using Error::Error;
};

/// Serialized record malformed or of an unknown version.
class SerializationError : public Error {
public:
    using Error::Error;
};

}  // namespace modelforge
