#pragma once

#include <stdexcept>
#include <string>

namespace bp {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or semantically invalid configuration (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

/// Numerical failure: solver non-convergence, tracking fault, ... (exit code 3).
struct NumericalError : Error {
    using Error::Error;
};

/// Certification failure: ambiguous matching, failed monodromy check (exit code 4).
struct CertificationError : Error {
    using Error::Error;
};

} // namespace bp
