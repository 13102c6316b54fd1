#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptzgs {

// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NonFiniteInput : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class DisconnectedGraph : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

/// Hessian factorization failed, i.e. the objective is not strongly convex at the evaluated point.
class SingularHessian : public Error {
public:
    SingularHessian(std::size_t agent, const std::string& what)
        : Error(what), agent_(agent) {}
    std::size_t agent() const noexcept { return agent_; }

private:
    std::size_t agent_;
};

class GridTooFine : public Error {
public:
    using Error::Error;
};

class NonFiniteState : public Error {
public:
    NonFiniteState(double time, std::size_t component, const std::string& what)
        : Error(what), time_(time), component_(component) {}
    double time() const noexcept { return time_; }
    std::size_t component() const noexcept { return component_; }

private:
    double time_;
    std::size_t component_;
};

class InvalidConstants : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EnvelopeViolation : public Error {
public:
    EnvelopeViolation(double time, double ratio, const std::string& what)
        : Error(what), time_(time), ratio_(ratio) {}
    double time() const noexcept { return time_; }
    double ratio() const noexcept { return ratio_; }

private:
    double time_;
    double ratio_;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace ptzgs
