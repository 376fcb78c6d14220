#pragma once

#include <stdexcept>
#include <string>

namespace jlusin {

// Invalid parameters or arguments outside an operation's domain.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A configuration bundle violates a stated constraint (CLI exit code 1).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A series or quadrature failed to reach its tolerance (CLI exit code 3).
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Output file could not be opened or written; the message carries the path.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace jlusin
