#ifndef HELIX_PROFILE_HPP
#define HELIX_PROFILE_HPP

#include <vector>

namespace helix {

// Radial core profile: the positive solution of
//   phi'' + phi'/r + phi^p = 0,  phi'(0) = 0,  phi(1) = 0
// on the unit disk, together with its boundary slope and disk integrals.
class ProfileTable {
  public:
    double p() const { return p_; }
    double slope_at_one() const { return slope_; }          // phi'(1) < 0
    double amplitude() const { return amplitude_; }          // phi(0)
    double integral_phi_p() const { return int_p_; }         // disk integral of phi^p
    double integral_phi_p1() const { return int_p1_; }       // disk integral of phi^{p+1}

    // phi(r) for r in [0,1] by cubic Hermite interpolation of the table;
    // zero for r >= 1.
    double phi(double r) const;
    double phi_prime(double r) const;

    int sample_count() const { return static_cast<int>(vals_.size()); }

    friend ProfileTable solve_profile(double p, int samples);

  private:
    double p_ = 2.0;
    double slope_ = 0.0;
    double amplitude_ = 0.0;
    double int_p_ = 0.0;
    double int_p1_ = 0.0;
    double dr_ = 0.0;
    std::vector<double> vals_;    // phi at uniform radii
    std::vector<double> derivs_;  // phi' at uniform radii
};

// Shooting solve: central amplitude found by bisection so that phi(1) = 0
// to 1e-12. Valid for 1 < p <= 6.
ProfileTable solve_profile(double p, int samples = 2048);

// Core radius s from
//   eps^{2/(p-1)} s^{-2/(p-1)} phi'(1) = qhat ln(1/eps) / ln(s),
// solved by a safeguarded Newton iteration in t = ln(s), bracketed inside
// (eps^2, sqrt(eps)). Residual of the defining relation <= 1e-14.
double solve_core_radius(double eps, double qhat, const ProfileTable& table);

}  // namespace helix

#endif
