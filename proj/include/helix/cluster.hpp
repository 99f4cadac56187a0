#ifndef HELIX_CLUSTER_HPP
#define HELIX_CLUSTER_HPP

#include "helix/ansatz.hpp"
#include "helix/equilibria.hpp"

namespace helix {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

// Indicator region of one species' nonlinearity.
struct SpeciesMask {
    enum class Kind { Annulus, Disk } kind = Kind::Disk;
    double ring_radius = 0.0;  // annulus center radius (annulus kind)
    Vec2 center;               // disk center (disk kind)
    double rho = 0.0;          // half width / disk radius

    bool contains(Vec2 x) const {
        if (kind == Kind::Annulus) {
            const double r = x.norm();
            return r > ring_radius - rho && r < ring_radius + rho;
        }
        return (x - center).norm() < rho;
    }
};

struct Species {
    WeightProfile weight;
    SpeciesMask mask;
    double circulation_target;  // 2 pi beta sqrt(det K)(0)
};

// Grid-exact symmetries a scenario's solution class carries; enforcing them
// per sweep pins the rotational/translational gauge of the Picard iteration.
struct SymmetryGroup {
    bool mirror_x = false;   // (x1, x2) -> (x1, -x2)
    bool mirror_y = false;   // (x1, x2) -> (-x1, x2)
    bool point = false;      // x -> -x
};

// One clustered-problem setup: the scenario's coefficients, species masks,
// predicted (scaled) centers and solver knobs.
struct Scenario {
    enum class Kind { Generic, Thm1_1, Thm1_2, Thm1_3, Thm1_4, Thm1_5 } kind = Kind::Thm1_1;

    double pitch = 1.0;
    double p = 2.0;
    double eps = 0.02;
    double grid_half_width = 1.2;
    int grid_n = 513;

    double alpha = 0.0;
    std::vector<Species> species;
    std::vector<Vec2> predicted_scaled_centers;  // before the |ln eps|^{-1/2} scaling
    std::vector<int> center_species;
    double rho0 = 0.3;
    SymmetryGroup symmetry;

    // Solver knobs.
    double damping = 0.6;
    double picard_tol = 1e-8;
    int max_sweeps = 300;
    double cg_tol = 1e-10;

    double log_factor() const { return std::fabs(std::log(eps)); }
    std::vector<Vec2> physical_centers() const;
    double q_at(Vec2 x, int species_id) const { return species[species_id].weight.q(x); }
    // Sum of masked species nonlinearities at value u.
    double nonlinearity(double u, Vec2 x) const;
};

// Scenario builders from the co-rotating cases; alpha and the betas follow
// the cases' coefficient choices, masks are the annuli/disks around the
// predicted filament traces with rho0 = 0.3 * (scaled separation).
Scenario make_scenario_polygon(int n_filaments, double kappa, double r_star, double pitch,
                               double p, double eps, double R, int grid_n);
Scenario make_scenario_polygon_center(int n_filaments, double kappa, double mu,
                                      double r_star, double pitch, double p, double eps,
                                      double R, int grid_n);
Scenario make_scenario_asym_pair(double kappa1, double kappa2, double lambda1,
                                 double lambda2, double pitch, double p, double eps,
                                 double R, int grid_n);
Scenario make_scenario_cross(double kappa, double mu, double lambda1, double lambda2,
                             double pitch, double p, double eps, double R, int grid_n);
Scenario make_scenario_cross_center(double kappa0, double kappa, double mu,
                                    double lambda1, double lambda2, double pitch,
                                    double p, double eps, double R, int grid_n);

struct ClusterComponent {
    Vec2 centroid;
    double diameter;
    double circulation;
    double circulation_target;
    int species;
    int node_count;
};

struct ClusterReport {
    std::vector<ClusterComponent> components;
    int iterations = 0;
    double final_residual = 0.0;      // fixed-point residual, relative
    bool converged = false;
    double energy = 0.0;              // I_eps of the solution
    double ansatz_sup_residual = 0.0; // sup |u - sum(V+H)|
    bool support_contained = true;    // support within |ln eps|^{-1} balls
    // leftover reduced configuration gradient (the translation-mode content
    // of the residual); zero exactly when the discrete critical-point
    // condition over the configuration holds
    double config_gradient = 0.0;
};

struct ClusterSolution {
    ScalarField u;
    ClusterReport report;
    AnsatzParameters params;   // centers / qhat / s of the initialization
    CenterGreenData green;
};

// Solves the clustered problem from the projected-bubble initialization at
// the predicted centers. The nonlinear iteration is a damped Newton method
// on A u = eps^{-2} f(u) (the naive Picard split is unstable in the bubble
// amplitude at desk-scale eps); damping follows the scenario's theta with
// backtracking on the residual norm.
ClusterSolution solve_clustered(const Scenario& s);

ClusterReport cluster_diagnostics(const ScalarField& u, const Scenario& s);

// I_eps(sum V + H) for the scenario's ansatz at the given centers/heights.
double energy_of_ansatz(const Scenario& s, const EllipticOperator& op,
                        const CoefficientField& field, const ProfileTable& table,
                        const AnsatzParameters& params);

// Helical transport of the planar cross-section to 3D vorticity samples:
//   w(x1,x2,x3,t) = eps^{-2} sum_s (u(Rbar(x1,x2)) - q_s |ln eps|)_+^p 1_mask,
//   vorticity = (w/h)(x2, -x1, h), Rbar the clockwise rotation by x3/h - alpha |ln eps| t.
std::vector<Vec3> lift_vorticity_3d(const ScalarField& u, const Scenario& s,
                                    const std::vector<Vec3>& samples, double t);

}  // namespace helix

#endif
