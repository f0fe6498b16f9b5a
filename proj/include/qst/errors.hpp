#pragma once

#include <stdexcept>
#include <string>

namespace qst {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: config fields, boundary data, ratio lists.
struct ValidationError : Error {
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// Linear system could not be factorized or solved.
struct SolverError : Error {
    using Error::Error;
};

// Missing or malformed files.
struct IoError : Error {
    using Error::Error;
};

} // namespace qst
