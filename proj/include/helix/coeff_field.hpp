#ifndef HELIX_COEFF_FIELD_HPP
#define HELIX_COEFF_FIELD_HPP

#include <functional>
#include <optional>

#include "helix/geometry.hpp"

namespace helix {

// Coefficient matrix map K(x) of the divergence-form operator -div(K grad).
// The Helical kind is
//   K(x) = 1/(h^2+|x|^2) [ h^2+x2^2   -x1 x2  ;  -x1 x2   h^2+x1^2 ],
// which acts as K x = h^2/(h^2+|x|^2) x on the radial direction and as the
// identity on the tangential one.
class CoefficientField {
  public:
    enum class Kind { Helical, Identity, Custom };

    static CoefficientField helical(double pitch, double half_width);
    static CoefficientField identity(double half_width);
    static CoefficientField custom(std::function<Mat2(Vec2)> matrix_map,
                                   double half_width);

    Kind kind() const { return kind_; }
    double pitch() const { return pitch_; }
    double half_width() const { return half_width_; }

    // K(x), det K(x) and sqrt(det K(x)). Throws DomainError outside the
    // domain square, ValidationError if a Custom map returns a non-SPD matrix.
    struct Metric {
        Mat2 K;
        double det;
        double sqrt_det;
    };
    Metric eval_metric(Vec2 x) const;

    // Unique SPD factor T with T^{-1} T^{-T} = K(y), i.e. T = K(y)^{-1/2}.
    Mat2 factor_T(Vec2 y) const;

    // dK/dx1 and dK/dx2; analytic for Helical and Identity, central finite
    // differences (step 1e-5 * max(1,|x|)) for Custom.
    void metric_derivatives(Vec2 x, Mat2& dK1, Mat2& dK2) const;

    bool inside(Vec2 x) const;

  private:
    CoefficientField() = default;
    Kind kind_ = Kind::Identity;
    double pitch_ = 1.0;
    double half_width_ = 1.0;
    std::function<Mat2(Vec2)> map_;
};

// Rotation-profile weight q(x) = (alpha/2)|x|^2 + beta.
struct WeightProfile {
    double alpha = 0.0;
    double beta = 1.0;

    double q(Vec2 x) const { return 0.5 * alpha * x.norm2() + beta; }
};

struct WeightEval {
    double q;
    double g;  // q^2 sqrt(det K)
    std::optional<Vec2> grad;
    std::optional<Mat2> hess;
};

// q, g = q^2 sqrt(det K) and optionally grad g, hess g. Analytic for
// Helical/Identity kinds (g is radial there), finite differences otherwise.
// Throws AssumptionError when q(x) <= 0.
WeightEval eval_weight(const WeightProfile& profile, const CoefficientField& field,
                       Vec2 x, bool derivatives);

// Radial second derivative of q^2 sqrt(det K) at the origin; for the Helical
// kind this equals beta (2 alpha h^2 - beta) / h^2.
double weight_second_derivative_at_origin(const WeightProfile& profile,
                                          const CoefficientField& field);

struct AssumptionReport {
    double min_eigenvalue;
    double max_eigenvalue;
    double min_q;
    double grad_norm_at_origin;
    bool k1_pass;
    bool q1_pass;
    bool kq_pass;
    bool pass() const { return k1_pass && q1_pass && kq_pass; }
};

// Samples quasi-random points in the disk of radius field.half_width() and
// reports empirical (K1)/(Q1)/(KQ) checks.
AssumptionReport validate_assumptions(const CoefficientField& field,
                                      const WeightProfile& profile,
                                      int sample_count = 10000);

}  // namespace helix

#endif
