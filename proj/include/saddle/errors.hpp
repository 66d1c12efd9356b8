#pragma once

#include <stdexcept>
#include <string>

namespace saddle {

// Problem data is rejected before any analysis runs: malformed tables,
// bad shapes, NaN entries, unknown schema fields, out-of-range indices.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A hypothesis of the requested construction does not hold for the given
// payoff / points / parameters, so the construction is refused up front.
class precondition_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A synthesized object failed its own exhaustive postcondition check.
// Seeing this means a bug (or a tolerance too tight for the input data),
// never a bad user request.
class verification_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace saddle
