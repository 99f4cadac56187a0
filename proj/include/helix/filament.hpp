#ifndef HELIX_FILAMENT_HPP
#define HELIX_FILAMENT_HPP

#include <complex>
#include <vector>

namespace helix {

using Complex = std::complex<double>;

// N periodic planar curves X_j(s) sampled on M uniform points over [0, L),
// with circulations kappa_j and core structure constants alpha_j.
struct FilamentEnsemble {
    double period = 2.0 * M_PI;                       // L
    std::vector<double> circulations;                 // kappa_j
    std::vector<double> structure_constants;          // alpha_j, default 1
    std::vector<std::vector<Complex>> positions;      // X_j(s_k)

    int count() const { return static_cast<int>(positions.size()); }
    int modes() const { return positions.empty() ? 0 : static_cast<int>(positions[0].size()); }

    void validate() const;  // shared M power of two >= 8, matching sizes
};

// Minimum over s of the pairwise filament separations.
double min_separation(const FilamentEnsemble& e);

// Right-hand side of the interaction system
//   dX_j/dtau = (1/4pi) ( i a_j k_j X_j'' + 2i sum_{k != j} k_k (X_j-X_k)/|X_j-X_k|^2 ),
// with X'' computed spectrally. Throws CollisionError below the separation floor.
std::vector<std::vector<Complex>> kmd_rhs(const FilamentEnsemble& e,
                                          double collision_floor = 1e-8);

struct Trajectory {
    std::vector<double> taus;
    std::vector<FilamentEnsemble> states;
    bool collided = false;
    double collision_tau = 0.0;
};

// Classical RK4 with fixed dt; saves every save_stride accepted steps
// (always the initial and final states). On collision the partial
// trajectory is returned with the collision flag set.
Trajectory kmd_integrate(const FilamentEnsemble& e, double dt, double T,
                         int save_stride = 1, double collision_floor = 1e-8);

struct KmdDiagnostics {
    Complex mean_vorticity_center;  // sum_j k_j  int X_j ds
    double second_moment;           // sum_j k_j  int |X_j|^2 ds
    double hamiltonian;
    double min_separation;
};

KmdDiagnostics kmd_diagnostics(const FilamentEnsemble& e);

// Spectral second derivative of one periodic curve (exact for band-limited data).
std::vector<Complex> spectral_second_derivative(const std::vector<Complex>& x, double period);

}  // namespace helix

#endif
