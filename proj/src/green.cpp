#include "helix/green.hpp"

#include <cmath>

#include "helix/errors.hpp"

namespace helix {

namespace {

// Least-squares quadratic fit c0 + c1 dx + c2 dy + c3 dx^2 + c4 dx dy + c5 dy^2
// over sample points; returns the value c0 at the expansion center.
double quadratic_extrapolate(const std::vector<Vec2>& pts, const std::vector<double>& vals) {
    const int m = 6;
    double ata[6][6] = {};
    double atb[6] = {};
    for (size_t k = 0; k < pts.size(); ++k) {
        const double dx = pts[k].x, dy = pts[k].y;
        const double row[6] = {1.0, dx, dy, dx * dx, dx * dy, dy * dy};
        for (int i = 0; i < m; ++i) {
            atb[i] += row[i] * vals[k];
            for (int j = 0; j < m; ++j) ata[i][j] += row[i] * row[j];
        }
    }
    // Gaussian elimination with partial pivoting.
    int perm[6] = {0, 1, 2, 3, 4, 5};
    for (int c = 0; c < m; ++c) {
        int piv = c;
        for (int r = c + 1; r < m; ++r)
            if (std::fabs(ata[r][c]) > std::fabs(ata[piv][c])) piv = r;
        if (std::fabs(ata[piv][c]) < 1e-300)
            throw SolverError("robin extrapolation: singular normal equations");
        std::swap(ata[c], ata[piv]);
        std::swap(atb[c], atb[piv]);
        std::swap(perm[c], perm[piv]);
        for (int r = c + 1; r < m; ++r) {
            const double f = ata[r][c] / ata[c][c];
            for (int k = c; k < m; ++k) ata[r][k] -= f * ata[c][k];
            atb[r] -= f * atb[c];
        }
    }
    double sol[6];
    for (int r = m - 1; r >= 0; --r) {
        double s = atb[r];
        for (int k = r + 1; k < m; ++k) s -= ata[r][k] * sol[k];
        sol[r] = s / ata[r][r];
    }
    return sol[0];
}

}  // namespace

GreenResult green_function(const EllipticOperator& op, const CoefficientField& field,
                           Vec2 y, double rel_tol) {
    const Grid& g = op.grid();
    const double h = g.spacing();
    if (!g.contains(y)) throw DomainError("green_function: source outside grid");
    if (std::fabs(y.x) > g.R - 4 * h || std::fabs(y.y) > g.R - 4 * h)
        throw DomainError("green_function: source closer than 4 spacings to the boundary");

    GreenResult out{ScalarField(g, "G"), ScalarField(g, "S"), 0.0, {}};
    const std::vector<double> b = op.dirac_load(y, &out.source);
    op.solve(b, out.G.values, nullptr, rel_tol);

    const Vec2 ys = out.source;
    const Mat2 T = field.factor_T(ys);
    const double inv_sqrt_det = 1.0 / field.eval_metric(ys).sqrt_det;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            const Vec2 w = T * (g.node(i, j) - ys);
            const double gamma = -std::log(w.norm2()) / (4.0 * M_PI);
            out.S.at(i, j) = out.G.at(i, j) - inv_sqrt_det * gamma;
        }

    // Robin value: quadratic extrapolation from the ring at 3..6 spacings.
    std::vector<Vec2> pts;
    std::vector<double> vals;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            const Vec2 d = g.node(i, j) - ys;
            const double r = d.norm();
            if (r >= 3.0 * h && r <= 6.0 * h) {
                pts.push_back(d);
                vals.push_back(out.S.at(i, j));
            }
        }
    if (pts.size() < 12) throw SolverError("green_function: robin ring under-populated");
    out.robin = quadratic_extrapolate(pts, vals);
    return out;
}

void eval_correctors(const CoefficientField& field, Vec2 y, Vec2 x, double& F1,
                     double& F2) {
    const Vec2 d = x - y;
    if (d.norm2() == 0.0) throw SingularityError("eval_correctors: x equals y");

    const Mat2 T = field.factor_T(y);
    const double inv_sqrt_det = 1.0 / field.eval_metric(y).sqrt_det;
    Mat2 dK[2];
    field.metric_derivatives(y, dK[0], dK[1]);

    const Vec2 w = T * d;
    const double wn2 = w.norm2();
    const double lnw = 0.5 * std::log(wn2);
    const double wv[2] = {w.x, w.y};

    // F1 = -(1/4pi) det^{-1/2} sum_{i,j,m} T_{mj} dK_ij/dx_i w_m ln|w|
    double f1 = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int m = 0; m < 2; ++m) f1 += T(m, j) * dK[i](i, j) * wv[m];
    F1 = -inv_sqrt_det * f1 * lnw / (4.0 * M_PI);

    // F2: the sixteen kernel terms. With c[m][n] shorthand for the bracket
    // attached to T^{-1}_{a m} T_{n j} T_{. i}:
    const double iw2 = 1.0 / wn2;
    const double k111 = -0.125 * wv[0] * wv[0] * wv[0] * iw2 + 0.125 * wv[0] * lnw;
    const double k112 = -0.125 * wv[0] * wv[0] * wv[1] * iw2 + 0.125 * wv[1] * lnw;
    const double k122m = -0.125 * wv[0] * wv[1] * wv[1] * iw2 - 0.125 * wv[0] * lnw;
    const double k112m = -0.125 * wv[0] * wv[0] * wv[1] * iw2 - 0.125 * wv[1] * lnw;
    const double k122 = -0.125 * wv[0] * wv[1] * wv[1] * iw2 + 0.125 * wv[0] * lnw;
    const double k222 = -0.125 * wv[1] * wv[1] * wv[1] * iw2 + 0.125 * wv[1] * lnw;

    const Mat2 Tinv = spd_function(field.eval_metric(y).K, [](double l) { return std::sqrt(l); });
    double f2 = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double dk = dK[a](i, j);
                f2 += dk * (Tinv(a, 0) * (T(0, j) * T(0, i) * k111 + T(0, j) * T(1, i) * k112 +
                                          T(1, j) * T(0, i) * k112 + T(1, j) * T(1, i) * k122m) +
                            Tinv(a, 1) * (T(0, j) * T(0, i) * k112m + T(0, j) * T(1, i) * k122 +
                                          T(1, j) * T(0, i) * k122 + T(1, j) * T(1, i) * k222));
            }
    F2 = inv_sqrt_det * f2 / M_PI;
}

}  // namespace helix
