#pragma once

#include <stdexcept>
#include <string>

namespace tclplus {

// Error taxonomy shared by all modules. Everything derives from Error so
// callers can catch the whole family at once (the CLI maps Error -> exit 1,
// ConfigError -> exit 2).

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Matrix contains NaN/Inf entries, or is otherwise unusable as input.
struct InvalidMatrix : Error {
    using Error::Error;
};

// Operand shapes are incompatible.
struct DimensionError : Error {
    using Error::Error;
};

// Hamiltonian fails the Hermiticity check.
struct InvalidHamiltonian : Error {
    using Error::Error;
};

// Requested expansion order is outside the supported range.
struct InvalidOrder : Error {
    using Error::Error;
};

// det(I - Sigma) collapsed: the standard TCL generator does not exist here.
// This is scientific output (breakdown), reported rather than masked.
struct SingularGenerator : Error {
    SingularGenerator(const std::string& what, double time)
        : Error(what), breakdown_time(time) {}
    double breakdown_time;
};

// Neumann-series reference inverse does not exist.
struct SingularReference : Error {
    using Error::Error;
};

// Problem size exceeds what a dense/brute-force path can handle.
struct CapacityError : Error {
    using Error::Error;
};

// Bad CLI flags or config files.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace tclplus
