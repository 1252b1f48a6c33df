#pragma once

#include <stdexcept>
#include <string>

namespace ris {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct SingularMatrix : Error {
    SingularMatrix(const std::string& what, double condition_estimate)
        : Error(what), condition_estimate(condition_estimate) {}
    double condition_estimate;
};

// Spectral radius of the inter-RIS loop matrix reached the stability bound;
// the feedback recursion would diverge.
struct UnstableLoop : Error {
    UnstableLoop(const std::string& what, double spectral_radius)
        : Error(what), spectral_radius(spectral_radius) {}
    double spectral_radius;
};

struct InfeasibleSubproblem : Error {
    using Error::Error;
};

struct InfeasibleConfiguration : Error {
    using Error::Error;
};

struct SolverFailure : Error {
    SolverFailure(const std::string& what, double best_violation)
        : Error(what), best_violation(best_violation) {}
    double best_violation;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace ris
