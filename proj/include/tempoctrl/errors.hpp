#pragma once

#include <stdexcept>
#include <string>

namespace tempoctrl {

/// Input file could not be parsed (network JSON, formula file, witness file).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A network failed validation where a valid one is required.
struct InvalidNetworkError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A decider was handed a network outside the class it is specified for.
struct ClassMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A grid step does not divide a bound it must divide.
struct StepMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An enumeration lattice is larger than the configured cap.
struct HorizonExceededError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A search exhausted its node budget.
struct ResourceCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A witness or counterexample file does not fit the expected shape.
struct WitnessMalformedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A formula file's type does not match the requested construction.
struct FormulaTypeMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tempoctrl
