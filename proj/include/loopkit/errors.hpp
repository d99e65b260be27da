#pragma once

#include <stdexcept>
#include <string>

namespace loopkit {

/// Base class for all loopkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- numerical failures ---

struct PoleOnAxis : Error {
    using Error::Error;
};

struct DegenerateLoop : Error {
    using Error::Error;
};

struct DegenerateParallel : Error {
    using Error::Error;
};

struct ConvergenceFailure : Error {
    using Error::Error;
};

struct DegreeCapExceeded : Error {
    using Error::Error;
};

struct GridTooCoarse : Error {
    using Error::Error;
};

struct ImproperTransferFunction : Error {
    using Error::Error;
};

struct UnstableSystem : Error {
    using Error::Error;
};

struct InfeasibleCorner : Error {
    using Error::Error;
};

struct NoCrossover : Error {
    using Error::Error;
};

struct NoFeasibleDesign : Error {
    using Error::Error;
};

struct SingularLoop : Error {
    using Error::Error;
};

// --- input / output failures ---

struct ParseError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct NonMonotonicFrequency : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace loopkit
