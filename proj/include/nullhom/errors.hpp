#pragma once

#include <stdexcept>
#include <string>

namespace nullhom {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Window / sequence errors.
struct WindowTooShort : Error {
    using Error::Error;
};
struct IndexOutOfWindow : Error {
    using Error::Error;
};

// Markov chain validation.
struct NotStochastic : Error {
    using Error::Error;
};
struct NotIrreducible : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};

// Lattice analysis.
struct RequiresExactScalars : Error {
    using Error::Error;
};
struct OverflowError : Error {
    using Error::Error;
};

// Linear algebra / iteration.
struct SolverFailure : Error {
    using Error::Error;
};
struct MaxIterations : Error {
    using Error::Error;
};

// Conductance fields.
struct InvalidBounds : Error {
    using Error::Error;
};
struct FieldMismatch : Error {
    using Error::Error;
};

// Diagnostics.
struct InsufficientReps : Error {
    using Error::Error;
};

// File / config parsing.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace nullhom
