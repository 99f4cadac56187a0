#ifndef HELIX_ANSATZ_HPP
#define HELIX_ANSATZ_HPP

#include <optional>

#include "helix/green.hpp"
#include "helix/profile.hpp"

namespace helix {

// One core bubble V_{eps, z, qhat}: the rescaled profile inside the T-ellipse
// of radius s, the matched logarithm outside. Continuous with continuous
// gradient across the interface by the defining relation of s.
class Bubble {
  public:
    Bubble(const CoefficientField& field, const ProfileTable& table, Vec2 center,
           double qhat, double s, double eps);

    double value(Vec2 x) const;
    Vec2 gradient(Vec2 x) const;
    double t_radius(Vec2 x) const;  // |T_z (x - z)|

    Vec2 center() const { return center_; }
    double qhat() const { return qhat_; }
    double s() const { return s_; }
    const Mat2& T() const { return T_; }

  private:
    const ProfileTable* table_;
    Vec2 center_;
    double qhat_, s_, eps_, p_;
    Mat2 T_;
    double core_amp_;   // (eps/s)^{2/(p-1)}
    double log_coef_;   // qhat ln(1/eps) / ln(s)
};

struct AnsatzParameters {
    std::vector<Vec2> centers;
    std::vector<double> qhat;
    std::vector<double> s_eps;
    double eps;
    void validate(const CoefficientField& field) const;
};

// Green data at the ansatz centers: Robin diagonal, pairwise Green values and
// the regular-part fields (for the zeta diagnostic).
struct CenterGreenData {
    std::vector<double> robin;                    // S(z_i, z_i)
    std::vector<std::vector<double>> green;       // G(z_i, z_j), i != j
    std::vector<ScalarField> regular_parts;       // S(., z_j)
};

CenterGreenData compute_center_green(const EllipticOperator& op,
                                     const CoefficientField& field,
                                     const std::vector<Vec2>& centers,
                                     double rel_tol = 1e-10);

// Fixed point for the bubble heights:
//   qhat_i = q_i(z_i) + 2 pi qhat_i sqrt(det K(z_i)) / ln(s_i) * S(z_i,z_i)
//          + sum_{j!=i} 2 pi qhat_j sqrt(det K(z_j)) / ln(s_j) * G(z_i,z_j),
// with s_i re-solved from qhat_i every sweep. Damped Picard from
// qhat_i = q_i(z_i); converged when sweeps differ by <= 1e-12.
std::vector<double> solve_qhat(const CoefficientField& field,
                               const std::vector<WeightProfile>& profiles,
                               const ProfileTable& table,
                               const std::vector<Vec2>& centers, double eps,
                               const CenterGreenData& green);

struct AnsatzBuild {
    std::vector<Bubble> bubbles;
    ScalarField v_total;               // sum of V_j
    std::vector<ScalarField> h_parts;  // projection terms H_j
    ScalarField sum_vh;                // sum (V_j + H_j)
    std::vector<double> zeta_sup;      // Lemma-2.3 quantity per center
    double matching_error;
};

// Samples the bubbles, solves each projection H_j from
//   -div(K grad H_j) = div((K - K(z_j)) grad V_j),  H_j = -V_j on the boundary,
// and measures the matching defect
//   max_i sup_{|T_i(x - z_i)| <= 2 s_i} | sum(V+H) - q_i |ln eps| - (V_i - qhat_i |ln eps|) |.
AnsatzBuild build_ansatz(const EllipticOperator& op, const CoefficientField& field,
                         const std::vector<WeightProfile>& profiles,
                         const ProfileTable& table, const AnsatzParameters& params,
                         const CenterGreenData* green = nullptr,
                         double rel_tol = 1e-10);

struct SignStructure {
    double L;          // smallest tested L with the outside negativity
    bool inner_ok;     // positivity on the shrunk core ellipses
    bool outer_ok;
    double gamma = 0.5;
};

// Lemma-2.4 style probe of sum(V+H) - q |ln eps|: negative outside the
// L s_j ellipses, positive inside radius (1 - L eps^gamma) s_j.
SignStructure measure_sign_structure(const AnsatzBuild& build,
                                     const std::vector<WeightProfile>& profiles,
                                     const AnsatzParameters& params, double gamma = 0.5,
                                     double l_max = 32.0);

}  // namespace helix

#endif
