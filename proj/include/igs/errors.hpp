#ifndef IGS_ERRORS_HPP
#define IGS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace igs {

// Malformed or out-of-contract inputs (bad config fields, invalid policies).
// The CLI maps this to exit code 1.
struct InputError : std::invalid_argument {
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Structurally valid inputs for which no solution of the assumed form exists
// (free-boundary level never reached, root bracketing fails, degenerate
// regimes). The CLI maps this to exit code 2.
struct RegimeError : std::runtime_error {
    explicit RegimeError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace igs

#endif
