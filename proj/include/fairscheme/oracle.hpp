#ifndef FAIRSCHEME_ORACLE_HPP
#define FAIRSCHEME_ORACLE_HPP

// Brute-force reference interpreter.  It evaluates the surface rules
// directly with lazily evaluated, memoized argument thunks and explores
// every decision sequence depth first by re-running the program from the
// start.  Two kinds of decision exist: the alternative of a `?`, and which
// rule of a function to apply.  A shared subexpression is evaluated once
// per run, so a shared choice is decided once.
//
// It uses nothing from the compiler or runtime and is meant for small,
// terminating programs only.

#include "fairscheme/syntax.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairscheme {

struct OracleOptions {
    std::uint64_t fuel_per_run = 2'000'000;  // evaluation steps in one run
    std::uint64_t max_runs = 50'000'000;
};

struct OracleResult {
    std::vector<std::string> values;  // sorted
    std::uint64_t runs = 0;
};

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Multiset of the goal's values.  Throws OracleError when a run exceeds
// its fuel; the message names the decision path taken.
OracleResult enumerate(const SurfaceProgram& program, const OracleOptions& options = {});

}  // namespace fairscheme

#endif  // FAIRSCHEME_ORACLE_HPP
