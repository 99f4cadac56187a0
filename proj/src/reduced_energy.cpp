#include "helix/reduced_energy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "helix/errors.hpp"

namespace helix {

ReducedEnergyContext make_context(const CoefficientField& field,
                                  const WeightProfile& profile, int n) {
    ReducedEnergyContext ctx;
    WeightEval e = eval_weight(profile, field, {0.0, 0.0}, true);
    ctx.hessian_at_origin = *e.hess;
    ctx.interaction_weight = e.g;
    ctx.whitening = spd_function(field.eval_metric({0.0, 0.0}).K,
                                 [](double l) { return 1.0 / std::sqrt(l); });
    ctx.n = n;
    return ctx;
}

HnResult h_n_eval(const ReducedEnergyContext& ctx, const std::vector<Vec2>& positions) {
    const int n = static_cast<int>(positions.size());
    const Mat2& B = ctx.hessian_at_origin;
    const Mat2& W = ctx.whitening;
    const Mat2 WtW = W.transpose() * W;
    const double c0 = ctx.interaction_weight;

    HnResult out;
    out.value = 0.0;
    out.gradient.assign(n, Vec2{});
    for (int j = 0; j < n; ++j) {
        const Vec2 Bz = B * positions[j];
        out.value += 0.5 * positions[j].dot(Bz);
        out.gradient[j] += Bz;
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Vec2 d = positions[i] - positions[j];
            const Vec2 wd = W * d;
            const double wd2 = wd.norm2();
            if (wd2 == 0.0) throw SingularityError("h_n_eval: coincident positions");
            out.value += 2.0 * c0 * 0.5 * std::log(wd2);  // ordered pairs count twice
            const Vec2 g = (WtW * d) * (2.0 * c0 / wd2);
            out.gradient[i] += g;
            out.gradient[j] -= g;
        }
    return out;
}

namespace {

struct CaseCoefficients {
    double alpha;
    std::vector<double> betas;  // per species
    double second_deriv(double h, int i) const {
        const double b = betas[i];
        return b * (2.0 * alpha * h * h - b) / (h * h);
    }
};

CaseCoefficients coefficients_for(int case_id, const LandscapeParams& p) {
    CaseCoefficients c{};
    const double h = p.h;
    switch (case_id) {
        case 1:
            c.alpha = p.kappa / (4 * M_PI) *
                      (1.0 / (h * h) - (p.n - 1) / (p.r_star * p.r_star));
            c.betas = {p.kappa / (2 * M_PI)};
            break;
        case 2:
            c.alpha = p.kappa / (4 * M_PI) *
                          (1.0 / (h * h) - (p.n - 1) / (p.r_star * p.r_star)) -
                      p.mu / (2 * M_PI * p.r_star * p.r_star);
            c.betas = {p.kappa / (2 * M_PI), p.mu / (2 * M_PI)};
            break;
        case 3:
            c.alpha = p.kappa1 / (4 * M_PI * h * h) -
                      p.kappa2 / (2 * M_PI * p.lambda1 * (p.lambda1 + p.lambda2));
            c.betas = {p.kappa1 / (2 * M_PI), p.kappa2 / (2 * M_PI)};
            break;
        case 4: {
            const double s = p.lambda1 * p.lambda1 + p.lambda2 * p.lambda2;
            c.alpha = p.kappa / (4 * M_PI * h * h) -
                      p.kappa / (4 * M_PI * p.lambda1 * p.lambda1) - p.mu / (M_PI * s);
            c.betas = {p.kappa / (2 * M_PI), p.mu / (2 * M_PI)};
            break;
        }
        case 5: {
            const double s = p.lambda1 * p.lambda1 + p.lambda2 * p.lambda2;
            c.alpha = p.kappa / (4 * M_PI * h * h) -
                      p.kappa0 / (2 * M_PI * p.lambda1 * p.lambda1) -
                      p.kappa / (4 * M_PI * p.lambda1 * p.lambda1) - p.mu / (M_PI * s);
            c.betas = {p.kappa / (2 * M_PI), p.mu / (2 * M_PI), p.kappa0 / (2 * M_PI)};
            break;
        }
        default:
            throw ValidationError("landscape_case: case_id must be 1..5");
    }
    return c;
}

void check_positive_radii(const std::vector<double>& r) {
    for (double v : r)
        if (!(v > 0.0)) throw DomainError("landscape: nonpositive radius");
}

}  // namespace

Landscape landscape_case(int case_id, const LandscapeParams& params) {
    const CaseCoefficients c = coefficients_for(case_id, params);
    const double h = params.h;
    Landscape L;

    if (case_id == 1) {
        const double g2 = c.second_deriv(h, 0);
        const double b2 = c.betas[0] * c.betas[0];
        const int n = params.n;
        L.dim = 1;
        L.value = [=](const std::vector<double>& r) {
            check_positive_radii(r);
            return 0.5 * n * g2 * r[0] * r[0] + n * (n - 1) * b2 * std::log(r[0]);
        };
        L.gradient = [=](const std::vector<double>& r) {
            check_positive_radii(r);
            return std::vector<double>{n * (g2 * r[0] + (n - 1) * b2 / r[0])};
        };
        return L;
    }
    if (case_id == 2) {
        const double g2 = c.second_deriv(h, 0);
        const double b1 = c.betas[0], b2 = c.betas[1];
        const int n = params.n;
        L.dim = 1;
        L.value = [=](const std::vector<double>& r) {
            check_positive_radii(r);
            return 0.5 * n * g2 * r[0] * r[0] +
                   (n * (n - 1) * b1 * b1 + 2 * n * b1 * b2) * std::log(r[0]);
        };
        L.gradient = [=](const std::vector<double>& r) {
            check_positive_radii(r);
            return std::vector<double>{
                n * (g2 * r[0] + ((n - 1) * b1 * b1 + 2 * b1 * b2) / r[0])};
        };
        return L;
    }
    if (case_id == 3) {
        const double g1 = c.second_deriv(h, 0), g2 = c.second_deriv(h, 1);
        const double b1 = c.betas[0], b2 = c.betas[1];
        L.dim = 2;
        L.value = [=](const std::vector<double>& l) {
            check_positive_radii(l);
            return 0.5 * (g1 * l[0] * l[0] + g2 * l[1] * l[1]) +
                   2.0 * b1 * b2 * std::log(l[0] + l[1]);
        };
        L.gradient = [=](const std::vector<double>& l) {
            check_positive_radii(l);
            const double t = 2.0 * b1 * b2 / (l[0] + l[1]);
            return std::vector<double>{g1 * l[0] + t, g2 * l[1] + t};
        };
        return L;
    }
    if (case_id == 4) {
        const double g1 = c.second_deriv(h, 0), g2 = c.second_deriv(h, 1);
        const double b1 = c.betas[0], b2 = c.betas[1];
        L.dim = 2;
        L.value = [=](const std::vector<double>& l) {
            check_positive_radii(l);
            return g1 * l[0] * l[0] + g2 * l[1] * l[1] +
                   2.0 * (b1 * b1 * std::log(2 * l[0]) + b2 * b2 * std::log(2 * l[1])) +
                   4.0 * b1 * b2 * std::log(l[0] * l[0] + l[1] * l[1]);
        };
        L.gradient = [=](const std::vector<double>& l) {
            check_positive_radii(l);
            const double s = l[0] * l[0] + l[1] * l[1];
            return std::vector<double>{
                2 * g1 * l[0] + 2 * b1 * b1 / l[0] + 8 * b1 * b2 * l[0] / s,
                2 * g2 * l[1] + 2 * b2 * b2 / l[1] + 8 * b1 * b2 * l[1] / s};
        };
        return L;
    }
    // case 5
    const double g1 = c.second_deriv(h, 0), g2 = c.second_deriv(h, 1);
    const double b1 = c.betas[0], b2 = c.betas[1], b0 = c.betas[2];
    L.dim = 2;
    L.value = [=](const std::vector<double>& l) {
        check_positive_radii(l);
        return g1 * l[0] * l[0] + g2 * l[1] * l[1] +
               2.0 * (b1 * b1 * std::log(2 * l[0]) + b2 * b2 * std::log(2 * l[1])) +
               4.0 * b1 * b2 * std::log(l[0] * l[0] + l[1] * l[1]) +
               4.0 * (b0 * b1 * std::log(l[0]) + b0 * b2 * std::log(l[1]));
    };
    L.gradient = [=](const std::vector<double>& l) {
        check_positive_radii(l);
        const double s = l[0] * l[0] + l[1] * l[1];
        return std::vector<double>{
            2 * g1 * l[0] + 2 * b1 * b1 / l[0] + 8 * b1 * b2 * l[0] / s + 4 * b0 * b1 / l[0],
            2 * g2 * l[1] + 2 * b2 * b2 / l[1] + 8 * b1 * b2 * l[1] / s + 4 * b0 * b2 / l[1]};
    };
    return L;
}

namespace {

// Dense symmetric eigenvalues by cyclic Jacobi; dimensions here are tiny.
std::vector<double> sym_eigenvalues(std::vector<std::vector<double>> a) {
    const int n = static_cast<int>(a.size());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(a[p][q]) < 1e-300) continue;
                const double theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double cth = 1.0 / std::sqrt(t * t + 1.0), s = t * cth;
                for (int k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = cth * akp - s * akq;
                    a[k][q] = s * akp + cth * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = cth * apk - s * aqk;
                    a[q][k] = s * apk + cth * aqk;
                }
            }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a[i][i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

// Gaussian elimination with partial pivoting for the tiny Newton systems.
bool dense_solve(std::vector<std::vector<double>> a, std::vector<double> b,
                 std::vector<double>& x) {
    const int n = static_cast<int>(a.size());
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        if (std::fabs(a[piv][c]) < 1e-300) return false;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
        x[r] = s / a[r][r];
    }
    return true;
}

double vec_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

CriticalPoint newton_search(const Landscape& obj, std::vector<double> x,
                            ExtremumMode mode, const FindCriticalOptions& opts) {
    const int n = obj.dim;
    const double sgn = (mode == ExtremumMode::Maximize) ? -1.0 : 1.0;
    auto f = [&](const std::vector<double>& p) { return sgn * obj.value(p); };
    auto grad = [&](const std::vector<double>& p) {
        std::vector<double> g = obj.gradient(p);
        for (double& v : g) v *= sgn;
        return g;
    };

    CriticalPoint out;
    out.converged = false;
    out.iterations = 0;
    std::vector<double> g = grad(x);
    for (int it = 0; it < opts.max_iterations; ++it) {
        out.iterations = it;
        if (vec_norm(g) <= opts.gradient_tol) {
            out.converged = true;
            break;
        }
        // Finite-difference Hessian from the analytic gradient, symmetrized.
        std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
        for (int j = 0; j < n; ++j) {
            const double step = opts.fd_step * std::max(1.0, std::fabs(x[j]));
            std::vector<double> xp = x, xm = x;
            xp[j] += step;
            xm[j] -= step;
            const std::vector<double> gp = grad(xp), gm = grad(xm);
            for (int i = 0; i < n; ++i) H[i][j] = (gp[i] - gm[i]) / (2 * step);
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                H[i][j] = H[j][i] = 0.5 * (H[i][j] + H[j][i]);

        std::vector<double> step, rhs = g;
        for (double& v : rhs) v = -v;
        bool ok = dense_solve(H, rhs, step);
        // If the Newton direction is unusable or uphill, fall back to descent.
        double dir_deriv = 0.0;
        if (ok)
            for (int i = 0; i < n; ++i) dir_deriv += step[i] * g[i];
        if (!ok || dir_deriv > 0.0) {
            step = g;
            for (double& v : step) v = -v;
        }

        const double f0 = f(x);
        double lambda = 1.0;
        bool progressed = false;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<double> xn = x;
            for (int i = 0; i < n; ++i) xn[i] += lambda * step[i];
            double fn;
            std::vector<double> gn;
            try {
                fn = f(xn);
                gn = grad(xn);
            } catch (const NumericalError&) {
                lambda *= 0.5;
                continue;
            }
            // Accept either descent or a gradient-norm reduction; near a
            // non-minimizing critical point only the latter applies.
            if (fn < f0 || vec_norm(gn) < vec_norm(g)) {
                x = xn;
                g = gn;
                progressed = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!progressed) break;
    }

    out.point = x;
    out.gradient_norm = vec_norm(obj.gradient(x));
    // Definiteness of the unsigned objective's Hessian at the solution.
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    for (int j = 0; j < n; ++j) {
        const double step = opts.fd_step * std::max(1.0, std::fabs(x[j]));
        std::vector<double> xp = x, xm = x;
        xp[j] += step;
        xm[j] -= step;
        const std::vector<double> gp = obj.gradient(xp), gm = obj.gradient(xm);
        for (int i = 0; i < n; ++i) H[i][j] = (gp[i] - gm[i]) / (2 * step);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) H[i][j] = H[j][i] = 0.5 * (H[i][j] + H[j][i]);
    out.hessian_eigenvalues = sym_eigenvalues(H);
    const double zero_tol = 1e-8;
    bool any_zero = false, all_neg = true, all_pos = true;
    for (double l : out.hessian_eigenvalues) {
        if (std::fabs(l) <= zero_tol) any_zero = true;
        if (l > 0) all_neg = false;
        if (l < 0) all_pos = false;
    }
    out.classification = any_zero ? "degenerate"
                        : all_neg ? "maximum"
                        : all_pos ? "minimum"
                                  : "saddle";
    if (!out.converged && out.gradient_norm <= opts.gradient_tol) out.converged = true;
    if (!out.converged)
        throw ConvergenceError("find_critical: no convergence; last gradient norm " +
                               std::to_string(out.gradient_norm));
    return out;
}

}  // namespace

CriticalPoint find_critical(const Landscape& objective, const std::vector<double>& start,
                            ExtremumMode mode, const FindCriticalOptions& opts) {
    if (static_cast<int>(start.size()) != objective.dim)
        throw ValidationError("find_critical: start dimension mismatch");
    objective.value(start);  // must be finite / in-domain

    if (opts.multistart <= 0) return newton_search(objective, start, mode, opts);

    std::mt19937 rng(opts.multistart_seed);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    CriticalPoint best;
    bool have = false;
    for (int s = 0; s <= opts.multistart; ++s) {
        std::vector<double> x0 = start;
        if (s > 0)
            for (double& v : x0) v *= 1.0 + jitter(rng);
        try {
            CriticalPoint c = newton_search(objective, x0, mode, opts);
            const double v = objective.value(c.point);
            if (!have || (mode == ExtremumMode::Maximize ? v > objective.value(best.point)
                                                         : v < objective.value(best.point))) {
                best = c;
                have = true;
            }
        } catch (const NumericalError&) {
            continue;
        }
    }
    if (!have) throw ConvergenceError("find_critical: all starts failed");
    return best;
}

ExpansionResult energy_expansion(const ExpansionInputs& in) {
    if (!(in.epsilon > 0.0 && in.epsilon < 1.0))
        throw DomainError("energy_expansion: epsilon outside (0,1)");
    const int n = static_cast<int>(in.q_values.size());
    if (static_cast<int>(in.sqrt_det_values.size()) != n ||
        static_cast<int>(in.robin_values.size()) != n ||
        static_cast<int>(in.green_values.size()) != n)
        throw ValidationError("energy_expansion: inconsistent input sizes");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && std::fabs(in.green_values[i][j] - in.green_values[j][i]) >
                              1e-8 * (1.0 + std::fabs(in.green_values[i][j])))
                throw ValidationError("energy_expansion: green_values not symmetric");

    const double e2 = in.epsilon * in.epsilon;
    const double lne = std::fabs(std::log(in.epsilon));
    ExpansionResult out;
    double leading = 0.0, pterm = 0.0, robin = 0.0, inter = 0.0;
    for (int j = 0; j < n; ++j) {
        const double qs = in.q_values[j] * in.q_values[j] * in.sqrt_det_values[j];
        leading += M_PI * e2 * lne * qs;
        pterm += 0.25 * (in.p - 1.0) * M_PI * e2 * qs;
        robin -= 2.0 * M_PI * M_PI * e2 * in.q_values[j] * in.q_values[j] *
                 in.sqrt_det_values[j] * in.sqrt_det_values[j] * in.robin_values[j];
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            inter -= 2.0 * M_PI * M_PI * e2 * in.q_values[i] * in.q_values[j] *
                     in.sqrt_det_values[i] * in.sqrt_det_values[j] * in.green_values[i][j];
        }
    out.terms["leading"] = leading;
    out.terms["p_term"] = pterm;
    out.terms["robin"] = robin;
    out.terms["interaction"] = inter;
    out.total = leading + pterm + robin + inter;
    return out;
}

}  // namespace helix
