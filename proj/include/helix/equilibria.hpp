#ifndef HELIX_EQUILIBRIA_HPP
#define HELIX_EQUILIBRIA_HPP

#include <string>
#include <variant>
#include <vector>

#include "helix/filament.hpp"

namespace helix {

// The five exact co-rotating configurations. Center vortices (cases 2 and 5)
// occupy index 0 of the built configuration.
struct PolygonCase {              // case 1: N equal vortices on a regular polygon
    int n = 3;
    double kappa = 1.0;
    double r_star = 1.0;
};
struct PolygonPlusCenterCase {    // case 2: polygon plus a center vortex
    int n = 3;
    double kappa = 1.0;
    double mu = 1.0;
    double r_star = 1.0;
};
struct Asym2Case {                // case 3: two vortices, different radii/strengths
    double kappa1 = 1.0;
    double kappa2 = 1.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
};
struct TwoByTwoCase {             // case 4: alternating cross of 2+2 vortices
    double kappa = 1.0;
    double mu = 1.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
};
struct TwoByTwoPlusCenterCase {   // case 5: the 2x2 cross plus a center vortex
    double kappa0 = 1.0;
    double kappa = 1.0;
    double mu = 1.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
};

using FamilyCase = std::variant<PolygonCase, PolygonPlusCenterCase, Asym2Case,
                                TwoByTwoCase, TwoByTwoPlusCenterCase>;

struct HelicalFamily {
    FamilyCase shape;
    double pitch = 1.0;        // h
    double global_phase = 0.0; // theta_0

    std::string case_name() const;
};

struct Configuration {
    std::vector<Complex> positions;   // Z_j(0)
    std::vector<double> circulations;
    double alpha;                     // co-rotation rate
};

// Relative residual of the case's compatibility condition; zero for
// cases 1 and 2 which are unconditional.
double compatibility_residual(const HelicalFamily& f);

// Initial positions, circulations and angular velocity for the family.
// Throws CompatibilityError when the case's compatibility condition fails
// beyond 1e-10 relative.
Configuration build_configuration(const HelicalFamily& f);

enum class MissingParam { Kappa2, Lambda2 };

// Solves the compatibility condition for the marked unknown; kappa2
// (Asym2) in closed form, lambda2 (TwoByTwo / TwoByTwoPlusCenter) by
// log-spaced bracket scanning plus bisection/secant refinement. On several
// roots the one nearest `guess` is returned (guess <= 0 with several roots
// raises an ambiguity SolverError listing the brackets).
double solve_missing_parameter(const HelicalFamily& f, MissingParam which,
                               double guess = -1.0);

// max_j | -i alpha Z_j - (1/4pi)( -i kappa_j Z_j / h^2
//                                 + 2i sum_k kappa_k (Z_j - Z_k)/|Z_j - Z_k|^2 ) |
double equilibrium_residual(const HelicalFamily& f);

// X_j(s) = Z_j(0) e^{i s/h} e^{i theta_0} on M samples over [0, 2 pi h).
FilamentEnsemble sample_filaments(const HelicalFamily& f, int M);

}  // namespace helix

#endif
