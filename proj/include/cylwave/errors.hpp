#pragma once

#include <stdexcept>

namespace cylwave {

// One exception type per contract failure so callers can catch precisely.

struct NonDivisibleExtent : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IndexOutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct InnerNotContained : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CflViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DataMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct LineSearchFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotFoundBelowCap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateSweep : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cylwave
