#include "helix/ansatz.hpp"

#include <algorithm>
#include <cmath>

#include "helix/errors.hpp"

namespace helix {

Bubble::Bubble(const CoefficientField& field, const ProfileTable& table, Vec2 center,
               double qhat, double s, double eps)
    : table_(&table), center_(center), qhat_(qhat), s_(s), eps_(eps), p_(table.p()) {
    if (!(qhat > 0.0 && s > 0.0 && eps > 0.0 && eps < 1.0))
        throw ValidationError("bubble parameters out of range");
    T_ = field.factor_T(center);
    core_amp_ = std::pow(eps_ / s_, 2.0 / (p_ - 1.0));
    log_coef_ = qhat_ * std::log(1.0 / eps_) / std::log(s_);
}

double Bubble::t_radius(Vec2 x) const { return (T_ * (x - center_)).norm(); }

double Bubble::value(Vec2 x) const {
    const double rho = t_radius(x);
    if (rho <= s_)
        return qhat_ * std::log(1.0 / eps_) + core_amp_ * table_->phi(rho / s_);
    return log_coef_ * std::log(rho);
}

Vec2 Bubble::gradient(Vec2 x) const {
    const Vec2 w = T_ * (x - center_);
    const double rho = w.norm();
    if (rho < 1e-300) return {0.0, 0.0};
    const Vec2 dir = T_.transpose() * w;  // rho * grad rho
    if (rho <= s_)
        return dir * (core_amp_ * table_->phi_prime(rho / s_) / (s_ * rho));
    return dir * (log_coef_ / (rho * rho));
}

void AnsatzParameters::validate(const CoefficientField& field) const {
    const size_t n = centers.size();
    if (qhat.size() != n || s_eps.size() != n)
        throw ValidationError("ansatz parameter arrays disagree in size");
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps outside (0,1)");
    const double smax = *std::max_element(s_eps.begin(), s_eps.end());
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            const Mat2 T = field.factor_T(centers[i]);
            if ((T * (centers[i] - centers[j])).norm() <= 2.0 * smax)
                throw ValidationError("ansatz centers closer than twice the core radius");
        }
}

CenterGreenData compute_center_green(const EllipticOperator& op,
                                     const CoefficientField& field,
                                     const std::vector<Vec2>& centers, double rel_tol) {
    const int n = static_cast<int>(centers.size());
    CenterGreenData data;
    data.robin.resize(n);
    data.green.assign(n, std::vector<double>(n, 0.0));
    std::vector<GreenResult> results;
    results.reserve(n);
    for (int j = 0; j < n; ++j) {
        results.push_back(green_function(op, field, centers[j], rel_tol));
        data.robin[j] = results[j].robin;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            data.green[i][j] = results[j].G.interpolate(centers[i]);
        }
    // Enforce the reciprocity the continuum kernel has.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (data.green[i][j] + data.green[j][i]);
            data.green[i][j] = data.green[j][i] = avg;
        }
    for (auto& r : results) data.regular_parts.push_back(std::move(r.S));
    return data;
}

std::vector<double> solve_qhat(const CoefficientField& field,
                               const std::vector<WeightProfile>& profiles,
                               const ProfileTable& table,
                               const std::vector<Vec2>& centers, double eps,
                               const CenterGreenData& green) {
    const int n = static_cast<int>(centers.size());
    if (static_cast<int>(profiles.size()) != n)
        throw ValidationError("solve_qhat: one weight profile per center required");

    std::vector<double> qh(n), sdet(n), lns(n);
    for (int i = 0; i < n; ++i) {
        qh[i] = profiles[i].q(centers[i]);
        if (!(qh[i] > 0.0)) throw AssumptionError("solve_qhat: q(z_i) <= 0");
        sdet[i] = field.eval_metric(centers[i]).sqrt_det;
    }

    // With the s_i frozen, the defining relation is linear in the qhat:
    // (I - M) qhat = q(z), M_ij = 2 pi sdet_j (S or G)_ij / ln s_j. Sweep the
    // small solve against the s_i(qhat_i) re-solve until stationary.
    for (int sweep = 0; sweep < 200; ++sweep) {
        for (int i = 0; i < n; ++i) lns[i] = std::log(solve_core_radius(eps, qh[i], table));
        std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) {
            rhs[i] = profiles[i].q(centers[i]);
            for (int j = 0; j < n; ++j) {
                const double coupling =
                    2.0 * M_PI * sdet[j] / lns[j] *
                    (i == j ? green.robin[i] : green.green[i][j]);
                A[i][j] = (i == j ? 1.0 : 0.0) - coupling;
            }
        }
        // Gaussian elimination with partial pivoting on the tiny system.
        std::vector<double> next(n);
        {
            for (int c = 0; c < n; ++c) {
                int piv = c;
                for (int rr = c + 1; rr < n; ++rr)
                    if (std::fabs(A[rr][c]) > std::fabs(A[piv][c])) piv = rr;
                if (std::fabs(A[piv][c]) < 1e-300)
                    throw ConvergenceError("solve_qhat: singular height system");
                std::swap(A[c], A[piv]);
                std::swap(rhs[c], rhs[piv]);
                for (int rr = c + 1; rr < n; ++rr) {
                    const double f = A[rr][c] / A[c][c];
                    for (int k = c; k < n; ++k) A[rr][k] -= f * A[c][k];
                    rhs[rr] -= f * rhs[c];
                }
            }
            for (int rr = n - 1; rr >= 0; --rr) {
                double v = rhs[rr];
                for (int k = rr + 1; k < n; ++k) v -= A[rr][k] * next[k];
                next[rr] = v / A[rr][rr];
            }
        }
        double delta = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!(next[i] > 0.0))
                throw ConvergenceError("solve_qhat: nonpositive bubble height");
            delta = std::max(delta, std::fabs(next[i] - qh[i]));
        }
        qh = next;
        if (delta <= 1e-12) return qh;
    }
    throw ConvergenceError("solve_qhat: fixed point did not converge in 200 sweeps");
}

AnsatzBuild build_ansatz(const EllipticOperator& op, const CoefficientField& field,
                         const std::vector<WeightProfile>& profiles,
                         const ProfileTable& table, const AnsatzParameters& params,
                         const CenterGreenData* green, double rel_tol) {
    params.validate(field);
    const Grid& g = op.grid();
    const double h = g.spacing();
    const int n = static_cast<int>(params.centers.size());
    if (static_cast<int>(profiles.size()) != n)
        throw ValidationError("build_ansatz: one weight profile per center required");

    AnsatzBuild out{.bubbles = {},
                    .v_total = ScalarField(g, "V"),
                    .h_parts = {},
                    .sum_vh = ScalarField(g, "V+H"),
                    .zeta_sup = std::vector<double>(n, 0.0),
                    .matching_error = 0.0};

    for (int j = 0; j < n; ++j) {
        // The grid must resolve each core: 4 cells across the T-ellipse.
        const SymEig2 e = sym_eig(field.eval_metric(params.centers[j]).K);
        const double phys_diam = 2.0 * params.s_eps[j] * std::sqrt(e.lambda2);
        if (phys_diam < 4.0 * h)
            throw ResolutionError("build_ansatz: core under-resolved (needs >= 4 cells)");
        out.bubbles.emplace_back(field, table, params.centers[j], params.qhat[j],
                                 params.s_eps[j], params.eps);
    }

    for (int jj = 0; jj < g.n; ++jj)
        for (int ii = 0; ii < g.n; ++ii) {
            double v = 0.0;
            for (const Bubble& b : out.bubbles) v += b.value(g.node(ii, jj));
            out.v_total.at(ii, jj) = v;
        }

    // Projection terms: -div(K grad H_j) = div((K - K(z_j)) grad V_j),
    // H_j = -V_j on the boundary.
    for (int j = 0; j < n; ++j) {
        const Bubble& b = out.bubbles[j];
        const Mat2 Kz = field.eval_metric(b.center()).K;
        auto flux = [&](Vec2 x) -> Vec2 {
            const Mat2 K = field.eval_metric(x).K;
            return (K - Kz) * b.gradient(x);
        };
        std::vector<double> load = op.divergence_load(flux);
        std::vector<double> bc(out.v_total.values.size(), 0.0);
        for (int ii = 0; ii < g.n; ++ii)
            for (int jj = 0; jj < g.n; ++jj)
                if (g.boundary(ii, jj)) bc[g.index(ii, jj)] = -b.value(g.node(ii, jj));
        ScalarField H(g, "H");
        op.solve(load, H.values, &bc, rel_tol);
        out.h_parts.push_back(std::move(H));
    }

    for (size_t k = 0; k < out.sum_vh.values.size(); ++k) {
        double s = out.v_total.values[k];
        for (int j = 0; j < n; ++j) s += out.h_parts[j].values[k];
        out.sum_vh.values[k] = s;
    }

    const double lne = std::log(1.0 / params.eps);
    if (green) {
        // zeta_j = H_j + (2 pi qhat_j sqrt(det K) ln(1/eps) / ln s_j) S(., z_j),
        // measured away from the source cells of the discrete kernels.
        for (int j = 0; j < n; ++j) {
            const double coef = 2.0 * M_PI * params.qhat[j] *
                                field.eval_metric(params.centers[j]).sqrt_det * lne /
                                std::log(params.s_eps[j]);
            double sup = 0.0;
            for (int jj = 1; jj < g.n - 1; ++jj)
                for (int ii = 1; ii < g.n - 1; ++ii) {
                    const Vec2 x = g.node(ii, jj);
                    bool near_source = false;
                    for (int k = 0; k < n; ++k)
                        if ((x - params.centers[k]).norm() < 3.0 * h) near_source = true;
                    if (near_source) continue;
                    sup = std::max(sup, std::fabs(out.h_parts[j].at(ii, jj) +
                                                  coef * green->regular_parts[j].at(ii, jj)));
                }
            out.zeta_sup[j] = sup;
        }
    }

    // Matching defect over the doubled core ellipses.
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const Bubble& b = out.bubbles[i];
        const double qi_lne = params.qhat[i] * lne;
        for (int jj = 1; jj < g.n - 1; ++jj)
            for (int ii = 1; ii < g.n - 1; ++ii) {
                const Vec2 x = g.node(ii, jj);
                if (b.t_radius(x) > 2.0 * params.s_eps[i]) continue;
                const double lhs = out.sum_vh.at(ii, jj) - profiles[i].q(x) * lne;
                const double rhs = b.value(x) - qi_lne;
                worst = std::max(worst, std::fabs(lhs - rhs));
            }
    }
    out.matching_error = worst;
    return out;
}

SignStructure measure_sign_structure(const AnsatzBuild& build,
                                     const std::vector<WeightProfile>& profiles,
                                     const AnsatzParameters& params, double gamma,
                                     double l_max) {
    const Grid& g = build.sum_vh.grid;
    const int n = static_cast<int>(params.centers.size());
    const double lne = std::log(1.0 / params.eps);
    const double eg = std::pow(params.eps, gamma);

    auto q_at = [&](Vec2 x) {
        int best = 0;
        double bd = 1e300;
        for (int j = 0; j < n; ++j) {
            const double d = (x - params.centers[j]).norm();
            if (d < bd) { bd = d; best = j; }
        }
        return profiles[best].q(x);
    };

    auto outer_holds = [&](double L) {
        for (int jj = 0; jj < g.n; ++jj)
            for (int ii = 0; ii < g.n; ++ii) {
                const Vec2 x = g.node(ii, jj);
                bool inside = false;
                for (int j = 0; j < n; ++j)
                    if (build.bubbles[j].t_radius(x) <= L * params.s_eps[j]) inside = true;
                if (inside) continue;
                if (build.sum_vh.at(ii, jj) - q_at(x) * lne >= 0.0) return false;
            }
        return true;
    };
    auto inner_holds = [&](double L) {
        if (L * eg >= 1.0) return false;  // shrunk ellipse empty
        bool saw_node = false;
        for (int jj = 0; jj < g.n; ++jj)
            for (int ii = 0; ii < g.n; ++ii) {
                const Vec2 x = g.node(ii, jj);
                for (int j = 0; j < n; ++j)
                    if (build.bubbles[j].t_radius(x) <= (1.0 - L * eg) * params.s_eps[j]) {
                        saw_node = true;
                        if (build.sum_vh.at(ii, jj) - q_at(x) * lne <= 0.0) return false;
                    }
            }
        return saw_node;
    };

    SignStructure s{};
    s.gamma = gamma;
    for (double L = 1.05; L <= l_max; L *= 1.1) {
        if (outer_holds(L) && inner_holds(L)) {
            s.L = L;
            s.outer_ok = true;
            s.inner_ok = true;
            return s;
        }
    }
    s.L = l_max;
    s.outer_ok = outer_holds(l_max);
    s.inner_ok = inner_holds(l_max);
    return s;
}

}  // namespace helix
