#include "helix/coeff_field.hpp"

#include <cmath>

#include "helix/errors.hpp"

namespace helix {

namespace {

// R2 low-discrepancy sequence (generalized golden ratio).
struct QuasiRandom2 {
    double u = 0.5, v = 0.5;
    static constexpr double g = 1.32471795724474602596;  // plastic constant
    Vec2 next() {
        u += 1.0 / g;
        if (u >= 1.0) u -= 1.0;
        v += 1.0 / (g * g);
        if (v >= 1.0) v -= 1.0;
        return {u, v};
    }
};

}  // namespace

CoefficientField CoefficientField::helical(double pitch, double half_width) {
    if (pitch <= 0.0) throw ValidationError("helical pitch must be positive");
    if (half_width <= 0.0) throw ValidationError("domain half width must be positive");
    CoefficientField f;
    f.kind_ = Kind::Helical;
    f.pitch_ = pitch;
    f.half_width_ = half_width;
    return f;
}

CoefficientField CoefficientField::identity(double half_width) {
    if (half_width <= 0.0) throw ValidationError("domain half width must be positive");
    CoefficientField f;
    f.kind_ = Kind::Identity;
    f.half_width_ = half_width;
    return f;
}

CoefficientField CoefficientField::custom(std::function<Mat2(Vec2)> matrix_map,
                                          double half_width) {
    if (half_width <= 0.0) throw ValidationError("domain half width must be positive");
    CoefficientField f;
    f.kind_ = Kind::Custom;
    f.half_width_ = half_width;
    f.map_ = std::move(matrix_map);
    return f;
}

bool CoefficientField::inside(Vec2 x) const {
    const double tol = 1e-12 * std::max(1.0, half_width_);
    return std::fabs(x.x) <= half_width_ + tol && std::fabs(x.y) <= half_width_ + tol;
}

CoefficientField::Metric CoefficientField::eval_metric(Vec2 x) const {
    if (!inside(x)) throw DomainError("eval_metric: point outside domain");
    Mat2 K;
    switch (kind_) {
        case Kind::Identity:
            K = Mat2::identity();
            break;
        case Kind::Helical: {
            const double h2 = pitch_ * pitch_;
            const double d = h2 + x.norm2();
            K = Mat2{h2 + x.y * x.y, -x.x * x.y, -x.x * x.y, h2 + x.x * x.x} * (1.0 / d);
            break;
        }
        case Kind::Custom: {
            K = map_(x);
            if (std::fabs(K.a12 - K.a21) > 1e-12 * (1.0 + K.max_abs()))
                throw ValidationError("custom coefficient map is not symmetric");
            SymEig2 e = sym_eig(K);
            if (e.lambda1 <= 0.0)
                throw ValidationError("custom coefficient map is not positive definite");
            break;
        }
    }
    const double det = K.det();
    return {K, det, std::sqrt(det)};
}

Mat2 CoefficientField::factor_T(Vec2 y) const {
    const Metric m = eval_metric(y);
    SymEig2 e = sym_eig(m.K);
    if (e.lambda1 <= 0.0) throw SolverError("factor_T: coefficient matrix is singular");
    return spd_function(m.K, [](double l) { return 1.0 / std::sqrt(l); });
}

void CoefficientField::metric_derivatives(Vec2 x, Mat2& dK1, Mat2& dK2) const {
    switch (kind_) {
        case Kind::Identity:
            dK1 = Mat2{};
            dK2 = Mat2{};
            return;
        case Kind::Helical: {
            const double h2 = pitch_ * pitch_;
            const double d = h2 + x.norm2();
            const Mat2 M{h2 + x.y * x.y, -x.x * x.y, -x.x * x.y, h2 + x.x * x.x};
            const Mat2 dM1{0.0, -x.y, -x.y, 2.0 * x.x};
            const Mat2 dM2{2.0 * x.y, -x.x, -x.x, 0.0};
            dK1 = dM1 * (1.0 / d) + M * (-2.0 * x.x / (d * d));
            dK2 = dM2 * (1.0 / d) + M * (-2.0 * x.y / (d * d));
            return;
        }
        case Kind::Custom: {
            const double step = 1e-5 * std::max(1.0, x.norm());
            dK1 = (map_({x.x + step, x.y}) - map_({x.x - step, x.y})) * (0.5 / step);
            dK2 = (map_({x.x, x.y + step}) - map_({x.x, x.y - step})) * (0.5 / step);
            return;
        }
    }
}

namespace {

// g(r) = q(r)^2 sqrt(det K(r)) along a radius for the radially symmetric
// kinds; returns g, g' and g''.
void radial_weight(const WeightProfile& p, const CoefficientField& f, double r,
                   double& g, double& gr, double& grr) {
    const double q = 0.5 * p.alpha * r * r + p.beta;
    const double qr = p.alpha * r;
    const double qrr = p.alpha;
    double w, wr, wrr;
    if (f.kind() == CoefficientField::Kind::Helical) {
        const double h = f.pitch();
        const double d = h * h + r * r;
        w = h / std::sqrt(d);
        wr = -h * r * std::pow(d, -1.5);
        wrr = -h * std::pow(d, -1.5) + 3.0 * h * r * r * std::pow(d, -2.5);
    } else {
        w = 1.0;
        wr = 0.0;
        wrr = 0.0;
    }
    g = q * q * w;
    gr = 2.0 * q * qr * w + q * q * wr;
    grr = 2.0 * qr * qr * w + 2.0 * q * qrr * w + 4.0 * q * qr * wr + q * q * wrr;
}

double weight_g(const WeightProfile& p, const CoefficientField& f, Vec2 x) {
    const double q = p.q(x);
    return q * q * f.eval_metric(x).sqrt_det;
}

}  // namespace

WeightEval eval_weight(const WeightProfile& profile, const CoefficientField& field,
                       Vec2 x, bool derivatives) {
    const double q = profile.q(x);
    if (q <= 0.0) throw AssumptionError("eval_weight: q(x) <= 0 violates (Q1)");
    WeightEval out;
    out.q = q;
    out.g = q * q * field.eval_metric(x).sqrt_det;
    if (!derivatives) return out;

    if (field.kind() == CoefficientField::Kind::Custom) {
        const double s = 1e-5 * std::max(1.0, x.norm());
        auto g = [&](Vec2 p) { return weight_g(profile, field, p); };
        const double gpx = g({x.x + s, x.y}), gmx = g({x.x - s, x.y});
        const double gpy = g({x.x, x.y + s}), gmy = g({x.x, x.y - s});
        const double g0 = out.g;
        out.grad = Vec2{(gpx - gmx) / (2 * s), (gpy - gmy) / (2 * s)};
        const double gxy = (g({x.x + s, x.y + s}) - g({x.x + s, x.y - s}) -
                            g({x.x - s, x.y + s}) + g({x.x - s, x.y - s})) /
                           (4 * s * s);
        out.hess = Mat2{(gpx - 2 * g0 + gmx) / (s * s), gxy, gxy,
                        (gpy - 2 * g0 + gmy) / (s * s)};
        return out;
    }

    // Radial analytic branch. grad g = g'(r) rhat; the Hessian splits into
    // radial and tangential parts, degenerating to g''(0) I at the origin.
    const double r = x.norm();
    double g, gr, grr;
    radial_weight(profile, field, r, g, gr, grr);
    if (r < 1e-14) {
        out.grad = Vec2{0.0, 0.0};
        out.hess = Mat2::diag(grr, grr);
        return out;
    }
    const Vec2 rhat = x / r;
    out.grad = rhat * gr;
    const double t = gr / r;
    out.hess = Mat2{grr * rhat.x * rhat.x + t * rhat.y * rhat.y,
                    (grr - t) * rhat.x * rhat.y,
                    (grr - t) * rhat.x * rhat.y,
                    grr * rhat.y * rhat.y + t * rhat.x * rhat.x};
    return out;
}

double weight_second_derivative_at_origin(const WeightProfile& profile,
                                          const CoefficientField& field) {
    if (field.kind() == CoefficientField::Kind::Custom) {
        WeightEval e = eval_weight(profile, field, {0.0, 0.0}, true);
        return 0.5 * (e.hess->a11 + e.hess->a22);
    }
    double g, gr, grr;
    radial_weight(profile, field, 0.0, g, gr, grr);
    return grr;
}

AssumptionReport validate_assumptions(const CoefficientField& field,
                                      const WeightProfile& profile,
                                      int sample_count) {
    AssumptionReport rep{};
    rep.min_eigenvalue = 1e300;
    rep.max_eigenvalue = -1e300;
    rep.min_q = 1e300;

    QuasiRandom2 seq;
    const double R = field.half_width();
    for (int k = 0; k < sample_count; ++k) {
        const Vec2 uv = seq.next();
        const double r = R * std::sqrt(uv.x);
        const double th = 2.0 * M_PI * uv.y;
        const Vec2 x{r * std::cos(th), r * std::sin(th)};
        Mat2 K;
        try {
            K = field.eval_metric(x).K;
        } catch (const ValidationError&) {
            rep.k1_pass = false;
            return rep;
        }
        SymEig2 e = sym_eig(K);
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, e.lambda1);
        rep.max_eigenvalue = std::max(rep.max_eigenvalue, e.lambda2);
        rep.min_q = std::min(rep.min_q, profile.q(x));
    }
    // Boundary ring, where q is extremal for the quadratic profile.
    for (int k = 0; k < 256; ++k) {
        const double th = 2.0 * M_PI * k / 256.0;
        rep.min_q = std::min(rep.min_q, profile.q({R * std::cos(th), R * std::sin(th)}));
    }

    double gnorm;
    if (field.kind() == CoefficientField::Kind::Custom) {
        WeightEval e = eval_weight(profile, field, {0.0, 0.0}, true);
        gnorm = e.grad->norm();
    } else {
        double g, gr, grr;
        radial_weight(profile, field, 0.0, g, gr, grr);
        gnorm = std::fabs(gr);
    }
    rep.grad_norm_at_origin = gnorm;
    rep.k1_pass = rep.min_eigenvalue > 0.0;
    rep.q1_pass = rep.min_q > 0.0;
    rep.kq_pass = gnorm <= 1e-10;
    return rep;
}

}  // namespace helix
