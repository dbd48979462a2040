#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netcpd {

/// Violated precondition on an argument (bad range, bad size, malformed input).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a scalar function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A population functional that must be positive is zero (e.g. an empty model).
class DegenerateModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative eigen-solver hit its iteration cap. Carries the last iterate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_estimate, std::size_t iterations)
        : std::runtime_error(what), last_estimate_(last_estimate), iterations_(iterations) {}

    double last_estimate() const noexcept { return last_estimate_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double last_estimate_;
    std::size_t iterations_;
};

/// Threshold calibration could not reach the requested false-alarm rate.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace netcpd
