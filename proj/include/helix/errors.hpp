#ifndef HELIX_ERRORS_HPP
#define HELIX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace helix {

// Base class for all numerical-module failures (CLI exit code 1).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input/configuration problems (CLI exit code 2).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : NumericalError { using NumericalError::NumericalError; };
struct AssumptionError : NumericalError { using NumericalError::NumericalError; };
struct CollisionError : NumericalError { using NumericalError::NumericalError; };
struct SingularityError : NumericalError { using NumericalError::NumericalError; };
struct CompatibilityError : NumericalError {
    double residual = 0.0;
    CompatibilityError(const std::string& what, double res)
        : NumericalError(what), residual(res) {}
};
struct SolverError : NumericalError { using NumericalError::NumericalError; };
struct ConvergenceError : NumericalError { using NumericalError::NumericalError; };
struct ResolutionError : NumericalError { using NumericalError::NumericalError; };
struct BlowupError : NumericalError { using NumericalError::NumericalError; };

}  // namespace helix

#endif
