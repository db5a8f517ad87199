#pragma once

#include <stdexcept>
#include <string>

namespace perstab {

/// Bad arguments: empty arrays, out-of-range parameters, malformed configs.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (Newton stall, singular system, divergence).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value fell outside the bracket covered by a stationary family.
class RangeError : public std::out_of_range {
public:
    RangeError(const std::string& what, std::size_t cell, double value)
        : std::out_of_range(what), cell_(cell), value_(value) {}

    std::size_t cell() const noexcept { return cell_; }
    double value() const noexcept { return value_; }

private:
    std::size_t cell_;
    double value_;
};

/// Time step larger than the monotonicity bound.
class CflViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Perturbation has left the interior of a truncated domain.
class EdgeBufferViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The measured quantity is already zero (state equals the stationary profile).
class AlreadyConverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace perstab
