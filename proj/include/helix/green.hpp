#ifndef HELIX_GREEN_HPP
#define HELIX_GREEN_HPP

#include "helix/elliptic.hpp"

namespace helix {

struct GreenResult {
    ScalarField G;        // G(., y_eff)
    ScalarField S;        // regular part S(., y_eff) = G - sqrt(det K)^{-1} Gamma(T (x-y))
    double robin;         // S(y, y) by quadratic extrapolation to the source
    Vec2 source;          // effective source point (center of the loaded cell)
};

// Discrete Green's function of -div(K grad .) with a unit load spread over
// the cell containing y (the effective source is that cell's center, reported
// back in `source`). The regular part subtracts
//   sqrt(det K(y))^{-1} Gamma(T_y (x - y)),  Gamma(z) = -(1/2pi) ln |z|,
// and the Robin value is a least-squares quadratic extrapolation of S from
// the node ring at 3..6 spacings around the source.
GreenResult green_function(const EllipticOperator& op, const CoefficientField& field,
                           Vec2 y, double rel_tol = 1e-10);

// First-order correctors of the regular part near y. F1 carries the
// log-gradient of K; F2 the sixteen T^{-1} T T weighted kernel terms.
// S(., y) + F1 + F2 has a continuously differentiable remainder.
void eval_correctors(const CoefficientField& field, Vec2 y, Vec2 x, double& F1,
                     double& F2);

}  // namespace helix

#endif
