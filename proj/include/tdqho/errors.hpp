#pragma once

#include <stdexcept>
#include <string>

namespace tdqho {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the declared domain (t outside [0, T], m <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A physical admissibility constraint failed (m5 > 0, omega5^2 > 0, ...).
class ValidityError : public Error {
public:
    ValidityError(std::string constraint, double t, double value)
        : Error("validity constraint '" + constraint + "' violated at t=" + std::to_string(t) +
                " (value " + std::to_string(value) + ")"),
          constraint_(std::move(constraint)), t_(t), value_(value) {}

    const std::string& constraint() const noexcept { return constraint_; }
    double time() const noexcept { return t_; }
    double value() const noexcept { return value_; }

private:
    std::string constraint_;
    double t_;
    double value_;
};

/// Closed-form expression hit a pole (omega^2 = 4 alpha_xp^2).
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Caller-supplied data violates a checked precondition.
class PreconditionError : public Error {
public:
    PreconditionError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// ODE solver failure: non-finite state or step-size underflow.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double t)
        : Error(what + " at t=" + std::to_string(t)), t_(t) {}

    double time() const noexcept { return t_; }

private:
    double t_;
};

/// Malformed configuration document or command line.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace tdqho
