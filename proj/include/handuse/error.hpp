#pragma once

#include <stdexcept>
#include <string>

namespace handuse {

// Malformed or out-of-contract input data (bad CSV rows, non-finite samples,
// single-class training sets, ...).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filter specification that cannot be realised (cutoff above Nyquist, bad order).
class DesignError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An internal consistency check failed.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace handuse
