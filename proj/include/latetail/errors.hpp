#pragma once

#include <stdexcept>
#include <string>

namespace latetail {

// Base for everything thrown by the library.  The CLI maps ConfigError to
// exit code 2 and every other Error to exit code 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the domain of an operation (r <= 2m, bad grid, ...).
struct DomainError : Error {
    using Error::Error;
};

// Iteration, quadrature or ODE solve did not reach its tolerance.
struct ConvergenceError : Error {
    using Error::Error;
};

// Numerical result is unusable (NaN, degenerate fit, resonance).
struct ComputeError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace latetail
