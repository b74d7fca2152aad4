#pragma once

#include <stdexcept>
#include <string>

namespace xvem {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MeshError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Raised when a linear solve does not reach the requested tolerance.
/// Carries the best relative residual that was achieved.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double best_residual)
        : Error(what), best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

} // namespace xvem
