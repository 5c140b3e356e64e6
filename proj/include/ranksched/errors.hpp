#pragma once

#include <stdexcept>
#include <string>

namespace ranksched {

// Input/contract violations. The CLI maps these to exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Failures that arise while executing a simulation. CLI exit code 3.
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetTooSmall : ValidationError {
    using ValidationError::ValidationError;
};

struct NonIntegralQuota : ValidationError {
    using ValidationError::ValidationError;
};

struct EmptySeries : ValidationError {
    using ValidationError::ValidationError;
};

struct MalformedReport : ValidationError {
    using ValidationError::ValidationError;
};

// Decomposition reports must cover ranks 0..N-1 with no holes.
struct RankGap : ValidationError {
    using ValidationError::ValidationError;
};

struct BadScenario : ValidationError {
    using ValidationError::ValidationError;
};

struct UnschedulableScenario : SimulationError {
    using SimulationError::SimulationError;
};

// Raised when a resize asks for more CPU than an existing hard limit allows.
struct ResizeConflict : SimulationError {
    using SimulationError::SimulationError;
};

} // namespace ranksched
