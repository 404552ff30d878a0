#pragma once

#include <stdexcept>
#include <string>

namespace reslab {

// Error taxonomy mirrors the CLI exit codes: usage_error -> 2,
// budget_error / convergence_error -> 3.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct usage_error : error {
    using error::error;
};

// Resonator window collapsed (L^2 < 3 or N < 2); caller must raise c_L or theta.
struct degenerate_error : usage_error {
    using usage_error::usage_error;
};

struct budget_error : error {
    using error::error;
};

struct convergence_error : error {
    using error::error;
};

}  // namespace reslab
