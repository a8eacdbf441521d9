#pragma once

#include <stdexcept>
#include <string>

namespace permlc {

// Input matrix spectrum falls outside the admissible interval.
class SpectrumOutOfRange : public std::runtime_error {
public:
    SpectrumOutOfRange(double offending, const std::string& what)
        : std::runtime_error(what), offending_(offending) {}
    double offending_eigenvalue() const { return offending_; }

private:
    double offending_;
};

// Exact-permanent dimension guards (n! / 2^n blowup).
class DimensionTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A chain coordinate left the plausible region; step size is misconfigured
// or the target is invalid.
class ChainDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonFiniteWeight : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientSamples : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Jacobi sweep budget exhausted before the off-diagonal mass vanished.
class EigenNonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BadInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace permlc
