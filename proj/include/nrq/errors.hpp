#pragma once

#include <stdexcept>
#include <string>

#include "nrq/types.hpp"

namespace nrq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid argument / precondition violation (bad grid sizes, exponent ranges,
// zero fields where nonzero ones are required, ...).
struct DomainError : Error {
    using Error::Error;
};

// A monotone bracket could not be established; carries the last bracket seen
// so the caller can report where the hypotheses broke down numerically.
struct BracketError : Error {
    Real lower;
    Real upper;
    BracketError(const std::string& message, Real lo, Real hi)
        : Error(message + " [last bracket: " + std::to_string(lo) + ", " +
                std::to_string(hi) + "]"),
          lower(lo), upper(hi) {}
};

struct SolveError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace nrq
