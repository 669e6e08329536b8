#pragma once

#include <stdexcept>
#include <string>

namespace scalelaw {

/// Bad input: malformed files, violated preconditions, invalid options.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a usable answer (non-convergence,
/// non-finite values, singular systems).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace scalelaw
