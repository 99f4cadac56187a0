#include "helix/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "helix/errors.hpp"

namespace helix {

namespace {

const Complex I(0.0, 1.0);

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw ValidationError(std::string(name) + " must be positive");
}

// Case 3 condition as a residual of
//   kappa2 (2 l2 h^2 + l1 l2 (l1+l2)) - kappa1 (2 l1 h^2 + l1 l2 (l1+l2)) = 0.
double asym2_residual(const Asym2Case& c, double h) {
    const double cross = c.lambda1 * c.lambda2 * (c.lambda1 + c.lambda2);
    return c.kappa2 * (2.0 * c.lambda2 * h * h + cross) -
           c.kappa1 * (2.0 * c.lambda1 * h * h + cross);
}

// Case 4 condition: both alpha expressions must agree.
double twobytwo_residual(const TwoByTwoCase& c, double h) {
    const double s = c.lambda1 * c.lambda1 + c.lambda2 * c.lambda2;
    const double lhs = c.kappa / (4 * M_PI * h * h) - c.kappa / (4 * M_PI * c.lambda1 * c.lambda1) -
                       c.mu / (M_PI * s);
    const double rhs = c.mu / (4 * M_PI * h * h) - c.mu / (4 * M_PI * c.lambda2 * c.lambda2) -
                       c.kappa / (M_PI * s);
    return lhs - rhs;
}

// Case 5 condition.
double twobytwo_center_residual(const TwoByTwoPlusCenterCase& c, double h) {
    const double s = c.lambda1 * c.lambda1 + c.lambda2 * c.lambda2;
    const double lhs = c.kappa / (4 * M_PI * h * h) - c.kappa0 / (2 * M_PI * c.lambda1 * c.lambda1) -
                       c.kappa / (4 * M_PI * c.lambda1 * c.lambda1) - c.mu / (M_PI * s);
    const double rhs = c.mu / (4 * M_PI * h * h) - c.kappa0 / (2 * M_PI * c.lambda2 * c.lambda2) -
                       c.mu / (4 * M_PI * c.lambda2 * c.lambda2) - c.kappa / (M_PI * s);
    return lhs - rhs;
}

double residual_scale(const HelicalFamily& f) {
    // Natural magnitude of the compatibility expressions, for relative checks.
    const double h = f.pitch;
    double kmax = 1.0, lmin = 1.0;
    if (auto* c = std::get_if<Asym2Case>(&f.shape)) {
        kmax = std::max(c->kappa1, c->kappa2);
        lmin = std::min(c->lambda1, c->lambda2);
    } else if (auto* c = std::get_if<TwoByTwoCase>(&f.shape)) {
        kmax = std::max(c->kappa, c->mu);
        lmin = std::min(c->lambda1, c->lambda2);
    } else if (auto* c = std::get_if<TwoByTwoPlusCenterCase>(&f.shape)) {
        kmax = std::max({c->kappa, c->mu, c->kappa0});
        lmin = std::min(c->lambda1, c->lambda2);
    }
    return kmax * (1.0 / (h * h) + 1.0 / (lmin * lmin));
}

}  // namespace

std::string HelicalFamily::case_name() const {
    switch (shape.index()) {
        case 0: return "polygon";
        case 1: return "polygon_plus_center";
        case 2: return "asym2";
        case 3: return "two_by_two";
        default: return "two_by_two_plus_center";
    }
}

double compatibility_residual(const HelicalFamily& f) {
    const double h = f.pitch;
    if (auto* c = std::get_if<Asym2Case>(&f.shape))
        return std::fabs(asym2_residual(*c, h)) /
               (c->kappa1 * (2 * c->lambda1 * h * h +
                             c->lambda1 * c->lambda2 * (c->lambda1 + c->lambda2)));
    if (auto* c = std::get_if<TwoByTwoCase>(&f.shape))
        return std::fabs(twobytwo_residual(*c, h)) / residual_scale(f);
    if (auto* c = std::get_if<TwoByTwoPlusCenterCase>(&f.shape))
        return std::fabs(twobytwo_center_residual(*c, h)) / residual_scale(f);
    return 0.0;
}

Configuration build_configuration(const HelicalFamily& f) {
    const double h = f.pitch;
    require_positive(h, "pitch");
    Configuration out;
    const Complex phase = std::exp(I * f.global_phase);

    if (auto* c = std::get_if<PolygonCase>(&f.shape)) {
        if (c->n < 2) throw ValidationError("polygon needs N >= 2");
        require_positive(c->kappa, "kappa");
        require_positive(c->r_star, "r_star");
        for (int j = 0; j < c->n; ++j) {
            out.positions.push_back(c->r_star * std::exp(I * (2.0 * M_PI * j / c->n)) * phase);
            out.circulations.push_back(c->kappa);
        }
        out.alpha = c->kappa / (4.0 * M_PI) *
                    (1.0 / (h * h) - (c->n - 1) / (c->r_star * c->r_star));
        return out;
    }
    if (auto* c = std::get_if<PolygonPlusCenterCase>(&f.shape)) {
        if (c->n < 2) throw ValidationError("polygon needs N >= 2");
        require_positive(c->kappa, "kappa");
        require_positive(c->mu, "mu");
        require_positive(c->r_star, "r_star");
        out.positions.push_back(Complex(0.0, 0.0));
        out.circulations.push_back(c->mu);
        for (int j = 0; j < c->n; ++j) {
            out.positions.push_back(c->r_star * std::exp(I * (2.0 * M_PI * j / c->n)) * phase);
            out.circulations.push_back(c->kappa);
        }
        out.alpha = c->kappa / (4.0 * M_PI) *
                        (1.0 / (h * h) - (c->n - 1) / (c->r_star * c->r_star)) -
                    c->mu / (2.0 * M_PI * c->r_star * c->r_star);
        return out;
    }
    if (auto* c = std::get_if<Asym2Case>(&f.shape)) {
        require_positive(c->kappa1, "kappa1");
        require_positive(c->kappa2, "kappa2");
        require_positive(c->lambda1, "lambda1");
        require_positive(c->lambda2, "lambda2");
        const double rel = compatibility_residual(f);
        if (rel > 1e-10)
            throw CompatibilityError("asym2 compatibility condition violated", rel);
        out.positions.push_back(c->lambda1 * phase);
        out.positions.push_back(-c->lambda2 * phase);
        out.circulations = {c->kappa1, c->kappa2};
        out.alpha = c->kappa1 / (4.0 * M_PI * h * h) -
                    c->kappa2 / (2.0 * M_PI * c->lambda1 * (c->lambda1 + c->lambda2));
        return out;
    }
    if (auto* c = std::get_if<TwoByTwoCase>(&f.shape)) {
        require_positive(c->kappa, "kappa");
        require_positive(c->mu, "mu");
        require_positive(c->lambda1, "lambda1");
        require_positive(c->lambda2, "lambda2");
        const double rel = compatibility_residual(f);
        if (rel > 1e-10)
            throw CompatibilityError("2x2 compatibility condition violated", rel);
        for (int j = 1; j <= 2; ++j) {
            out.positions.push_back(c->lambda1 * std::exp(I * (M_PI * (j - 1))) * phase);
            out.positions.push_back(c->lambda2 * std::exp(I * (M_PI * (2 * j - 1) / 2.0)) * phase);
        }
        out.circulations = {c->kappa, c->mu, c->kappa, c->mu};
        const double s = c->lambda1 * c->lambda1 + c->lambda2 * c->lambda2;
        out.alpha = c->kappa / (4 * M_PI * h * h) -
                    c->kappa / (4 * M_PI * c->lambda1 * c->lambda1) - c->mu / (M_PI * s);
        return out;
    }
    const auto& c = std::get<TwoByTwoPlusCenterCase>(f.shape);
    require_positive(c.kappa0, "kappa0");
    require_positive(c.kappa, "kappa");
    require_positive(c.mu, "mu");
    require_positive(c.lambda1, "lambda1");
    require_positive(c.lambda2, "lambda2");
    const double rel = compatibility_residual(f);
    if (rel > 1e-10)
        throw CompatibilityError("2x2+1 compatibility condition violated", rel);
    out.positions.push_back(Complex(0.0, 0.0));
    out.circulations.push_back(c.kappa0);
    for (int j = 1; j <= 2; ++j) {
        out.positions.push_back(c.lambda1 * std::exp(I * (M_PI * (j - 1))) * phase);
        out.positions.push_back(c.lambda2 * std::exp(I * (M_PI * (2 * j - 1) / 2.0)) * phase);
    }
    out.circulations.insert(out.circulations.end(), {c.kappa, c.mu, c.kappa, c.mu});
    const double s = c.lambda1 * c.lambda1 + c.lambda2 * c.lambda2;
    out.alpha = c.kappa / (4 * M_PI * h * h) - c.kappa0 / (2 * M_PI * c.lambda1 * c.lambda1) -
                c.kappa / (4 * M_PI * c.lambda1 * c.lambda1) - c.mu / (M_PI * s);
    return out;
}

namespace {

// Generic bracketed scan + bisection/secant refinement of a 1D root in
// lambda2 over (1e-4, 1e4), 64 log-spaced intervals.
double solve_lambda2(const std::function<double(double)>& resid, double guess) {
    const double lo = 1e-4, hi = 1e4;
    const int nscan = 64;
    std::vector<std::pair<double, double>> brackets;
    double prev_x = lo, prev_f = resid(lo);
    for (int i = 1; i <= nscan; ++i) {
        const double x = lo * std::pow(hi / lo, double(i) / nscan);
        const double fx = resid(x);
        if (std::isfinite(prev_f) && std::isfinite(fx) && prev_f * fx <= 0.0)
            brackets.emplace_back(prev_x, x);
        prev_x = x;
        prev_f = fx;
    }
    if (brackets.empty())
        throw SolverError("solve_missing_parameter: no sign change over (1e-4, 1e4)");
    if (brackets.size() > 1 && guess <= 0.0) {
        std::string msg = "solve_missing_parameter: several roots, supply a guess; brackets:";
        for (auto& b : brackets)
            msg += " [" + std::to_string(b.first) + ", " + std::to_string(b.second) + "]";
        throw SolverError(msg);
    }

    auto refine = [&](double a, double b) {
        double fa = resid(a), fb = resid(b);
        for (int it = 0; it < 200; ++it) {
            double m = (fb != fa) ? b - fb * (b - a) / (fb - fa) : 0.5 * (a + b);
            if (!(m > a && m < b)) m = 0.5 * (a + b);
            const double fm = resid(m);
            if (fm == 0.0 || b - a < 1e-15 * b) return m;
            if (fa * fm <= 0.0) { b = m; fb = fm; }
            else { a = m; fa = fm; }
        }
        return 0.5 * (a + b);
    };

    double best = 0.0, best_dist = 1e300;
    for (auto& b : brackets) {
        const double r = refine(b.first, b.second);
        const double dist = (guess > 0.0) ? std::fabs(r - guess) : 0.0;
        if (dist < best_dist) { best = r; best_dist = dist; }
    }
    return best;
}

}  // namespace

double solve_missing_parameter(const HelicalFamily& f, MissingParam which, double guess) {
    const double h = f.pitch;
    if (which == MissingParam::Kappa2) {
        const auto* c = std::get_if<Asym2Case>(&f.shape);
        if (!c) throw ValidationError("kappa2 is only solvable for the asym2 case");
        const double cross = c->lambda1 * c->lambda2 * (c->lambda1 + c->lambda2);
        return c->kappa1 * (2.0 * c->lambda1 * h * h + cross) /
               (2.0 * c->lambda2 * h * h + cross);
    }
    if (auto* c = std::get_if<TwoByTwoCase>(&f.shape)) {
        TwoByTwoCase probe = *c;
        auto resid = [&](double l2) mutable {
            probe.lambda2 = l2;
            return twobytwo_residual(probe, h);
        };
        const double r = solve_lambda2(resid, guess > 0.0 ? guess : c->lambda1);
        probe.lambda2 = r;
        if (std::fabs(twobytwo_residual(probe, h)) > 1e-12 * residual_scale(f))
            throw SolverError("solve_missing_parameter: residual above 1e-12");
        return r;
    }
    if (auto* c = std::get_if<TwoByTwoPlusCenterCase>(&f.shape)) {
        TwoByTwoPlusCenterCase probe = *c;
        auto resid = [&](double l2) mutable {
            probe.lambda2 = l2;
            return twobytwo_center_residual(probe, h);
        };
        const double r = solve_lambda2(resid, guess > 0.0 ? guess : c->lambda1);
        probe.lambda2 = r;
        if (std::fabs(twobytwo_center_residual(probe, h)) > 1e-12 * residual_scale(f))
            throw SolverError("solve_missing_parameter: residual above 1e-12");
        return r;
    }
    throw ValidationError("lambda2 is only solvable for the 2x2 cases");
}

double equilibrium_residual(const HelicalFamily& f) {
    const Configuration cfg = build_configuration(f);
    const int n = static_cast<int>(cfg.positions.size());
    const double h = f.pitch;
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        Complex rhs = -I * cfg.circulations[j] * cfg.positions[j] / (h * h);
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            const Complex d = cfg.positions[j] - cfg.positions[k];
            const double d2 = std::norm(d);
            if (d2 == 0.0) throw CollisionError("coincident vortices");
            rhs += 2.0 * I * cfg.circulations[k] * d / d2;
        }
        rhs /= 4.0 * M_PI;
        worst = std::max(worst, std::abs(-I * cfg.alpha * cfg.positions[j] - rhs));
    }
    return worst;
}

FilamentEnsemble sample_filaments(const HelicalFamily& f, int M) {
    if (M < 8 || (M & (M - 1)) != 0)
        throw ValidationError("sample count M must be a power of two >= 8");
    const Configuration cfg = build_configuration(f);
    FilamentEnsemble e;
    e.period = 2.0 * M_PI * f.pitch;
    e.circulations = cfg.circulations;
    e.structure_constants.assign(cfg.positions.size(), 1.0);
    for (const Complex& z : cfg.positions) {
        std::vector<Complex> x(M);
        for (int s = 0; s < M; ++s)
            x[s] = z * std::exp(I * (double(s) / M * 2.0 * M_PI));  // s_k/h spans one turn
        e.positions.push_back(std::move(x));
    }
    return e;
}

}  // namespace helix
