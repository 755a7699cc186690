#pragma once

#include <stdexcept>
#include <string>

namespace delaystab {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// An argument is outside the mathematical domain of an operation.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// A tabulated function was queried outside its knot range.
struct ExtrapolationError : DomainError {
    explicit ExtrapolationError(const std::string& msg) : DomainError(msg) {}
};

// A documented precondition failed (e.g. a sampled coefficient is negative).
struct PreconditionError : Error {
    explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

// The integrated state left the representable range.
struct OverflowError : Error {
    double blow_up_time;
    OverflowError(const std::string& msg, double t) : Error(msg), blow_up_time(t) {}
};

// Not enough samples to produce a meaningful estimate.
struct InsufficientDataError : Error {
    explicit InsufficientDataError(const std::string& msg) : Error(msg) {}
};

// A problem description file violates the input schema.
struct SchemaError : Error {
    explicit SchemaError(const std::string& msg) : Error(msg) {}
};

}  // namespace delaystab
