#ifndef HELIX_REDUCED_ENERGY_HPP
#define HELIX_REDUCED_ENERGY_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "helix/coeff_field.hpp"

namespace helix {

// Data of the reduced interaction functional
//   H_N(z) = 1/2 sum_j z_j . B z_j + sum_{i != j} c0 ln |W (z_i - z_j)|,
// where B is the Hessian of q^2 sqrt(det K) at 0, c0 = (q^2 sqrt(det K))(0)
// and W = K(0)^{-1/2}. The i != j sum runs over ordered pairs.
struct ReducedEnergyContext {
    Mat2 hessian_at_origin;
    double interaction_weight = 1.0;  // c0
    Mat2 whitening = Mat2::identity();
    int n = 2;
};

ReducedEnergyContext make_context(const CoefficientField& field,
                                  const WeightProfile& profile, int n);

struct HnResult {
    double value;
    std::vector<Vec2> gradient;
};

HnResult h_n_eval(const ReducedEnergyContext& ctx, const std::vector<Vec2>& positions);

// A scalar objective over a small number of radii, with analytic gradient.
struct Landscape {
    int dim;
    std::function<double(const std::vector<double>&)> value;
    std::function<std::vector<double>(const std::vector<double>&)> gradient;
};

// Scenario parameter packs for the five landscapes of the co-rotating cases.
struct LandscapeParams {
    int n = 2;            // polygon count (cases 1 and 2)
    double h = 1.0;       // pitch
    double kappa = 1.0;
    double mu = 1.0;      // center (case 2) / second species (case 4)
    double kappa0 = 1.0;  // center strength (case 5)
    double kappa1 = 1.0, kappa2 = 1.0;       // case 3
    double lambda1 = 1.0, lambda2 = 1.0;     // reference radii (cases 3..5)
    double r_star = 1.0;                     // reference radius (cases 1, 2)
};

// Landscapes H1..H5; dim is 1 for cases 1-2 and 2 for cases 3-5. The alpha
// and beta coefficients are derived from the params by the case's formulas.
Landscape landscape_case(int case_id, const LandscapeParams& params);

struct CriticalPoint {
    std::vector<double> point;
    double gradient_norm;
    std::vector<double> hessian_eigenvalues;
    std::string classification;  // "maximum", "minimum", "saddle", "degenerate"
    bool converged;
    int iterations;
};

enum class ExtremumMode { Maximize, Minimize };

struct FindCriticalOptions {
    int max_iterations = 100;
    double gradient_tol = 1e-10;
    double fd_step = 1e-6;
    int multistart = 0;          // extra perturbed seeds (0 = plain local search)
    unsigned multistart_seed = 12345;
};

// Damped Newton with finite-difference Hessian (from the analytic gradient)
// and backtracking. Reports Hessian eigenvalue signs at the solution with
// 1e-8 as the zero threshold.
CriticalPoint find_critical(const Landscape& objective, const std::vector<double>& start,
                            ExtremumMode mode, const FindCriticalOptions& opts = {});

// Inputs of the finite-dimensional energy expansion.
struct ExpansionInputs {
    double epsilon;
    double p;
    std::vector<double> q_values;          // q(z_j)
    std::vector<double> sqrt_det_values;   // sqrt(det K(z_j))
    std::vector<double> robin_values;      // S_K(z_j, z_j)
    std::vector<std::vector<double>> green_values;  // G_K(z_i, z_j), symmetric
};

struct ExpansionResult {
    double total;
    std::map<std::string, double> terms;  // leading, p_term, robin, interaction
};

//   sum_j pi eps^2 |ln eps| q^2 sqrt(det K)
// + sum_j (p-1)/4 pi eps^2 q^2 sqrt(det K)
// - sum_j 2 pi^2 eps^2 q^2 det K * S_K(z_j,z_j)
// - sum_{i != j} 2 pi^2 eps^2 q_i q_j sqrt(det K_i) sqrt(det K_j) G_K(z_i,z_j)
ExpansionResult energy_expansion(const ExpansionInputs& inputs);

}  // namespace helix

#endif
