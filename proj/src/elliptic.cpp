#include "helix/elliptic.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <thread>

#include "helix/errors.hpp"

namespace helix {

namespace {

// Worker count from HELIX_THREADS (default 1). Row-partitioned loops write
// disjoint outputs, so the results are bitwise independent of the setting.
int worker_count() {
    static const int n = [] {
        const char* env = std::getenv("HELIX_THREADS");
        const int v = env ? std::atoi(env) : 1;
        return std::max(1, std::min(v, 64));
    }();
    return n;
}

template <class F>
void parallel_rows(int lo, int hi, F&& body) {
    const int nt = worker_count();
    if (nt == 1 || hi - lo < 4 * nt) {
        for (int j = lo; j < hi; ++j) body(j);
        return;
    }
    std::vector<std::thread> pool;
    const int chunk = (hi - lo + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const int a = lo + t * chunk, b = std::min(hi, a + chunk);
        if (a >= b) break;
        pool.emplace_back([a, b, &body] {
            for (int j = a; j < b; ++j) body(j);
        });
    }
    for (auto& th : pool) th.join();
}

// Reference-cell integrals for bilinear elements: E = a Axx + b Ayy + c (Axy + Axy^T)
// for constant K = [[a, c], [c, b]] on a square cell. Local node order
// SW, SE, NE, NW.
const double AXX[4][4] = {{1.0 / 3, -1.0 / 3, -1.0 / 6, 1.0 / 6},
                          {-1.0 / 3, 1.0 / 3, 1.0 / 6, -1.0 / 6},
                          {-1.0 / 6, 1.0 / 6, 1.0 / 3, -1.0 / 3},
                          {1.0 / 6, -1.0 / 6, -1.0 / 3, 1.0 / 3}};
const double AYY[4][4] = {{1.0 / 3, 1.0 / 6, -1.0 / 6, -1.0 / 3},
                          {1.0 / 6, 1.0 / 3, -1.0 / 3, -1.0 / 6},
                          {-1.0 / 6, -1.0 / 3, 1.0 / 3, 1.0 / 6},
                          {-1.0 / 3, -1.0 / 6, 1.0 / 6, 1.0 / 3}};
// Axy = u v^T with u = d/dxi row integrals, v = d/deta column integrals.
const double UXI[4] = {-0.5, 0.5, 0.5, -0.5};
const double VETA[4] = {-0.5, -0.5, 0.5, 0.5};

const int LOCAL_DI[4] = {0, 1, 1, 0};
const int LOCAL_DJ[4] = {0, 0, 1, 1};

// 2x2 Gauss points on the unit square.
const double GP[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};

}  // namespace

struct EllipticOperator::DstPlan {
    int m = 0;
    fftw_plan plan = nullptr;
    double* buf = nullptr;
    ~DstPlan() {
        if (plan) fftw_destroy_plan(plan);
        if (buf) fftw_free(buf);
    }
};

EllipticOperator::EllipticOperator(const Grid& grid, const CoefficientField& field)
    : grid_(grid) {
    const int n = grid_.n;
    stencil_.assign(9, std::vector<double>(static_cast<size_t>(n) * n, 0.0));

    for (int cj = 0; cj < n - 1; ++cj)
        for (int ci = 0; ci < n - 1; ++ci) {
            const Mat2 K = field.eval_metric(grid_.cell_center(ci, cj)).K;
            const double a = K.a11, b = K.a22, c = 0.5 * (K.a12 + K.a21);
            double E[4][4];
            for (int p = 0; p < 4; ++p)
                for (int q = 0; q < 4; ++q)
                    E[p][q] = a * AXX[p][q] + b * AYY[p][q] +
                              c * (UXI[p] * VETA[q] + UXI[q] * VETA[p]);
            for (int p = 0; p < 4; ++p) {
                const int ip = ci + LOCAL_DI[p], jp = cj + LOCAL_DJ[p];
                for (int q = 0; q < 4; ++q) {
                    const int di = (ci + LOCAL_DI[q]) - ip;
                    const int dj = (cj + LOCAL_DJ[q]) - jp;
                    stencil_[(dj + 1) * 3 + (di + 1)][grid_.index(ip, jp)] += E[p][q];
                }
            }
        }

    // Constant-coefficient symbol for the preconditioner: the identity-K
    // stencil splits as Kx (x) My + Mx (x) Ky over the sine basis.
    const int m = n - 2;
    symbol_.resize(static_cast<size_t>(m) * m);
    std::vector<double> kap(m), mu(m);
    for (int k = 0; k < m; ++k) {
        const double cth = std::cos((k + 1) * M_PI / (n - 1));
        kap[k] = 2.0 - 2.0 * cth;
        mu[k] = (4.0 + 2.0 * cth) / 6.0;
    }
    for (int l = 0; l < m; ++l)
        for (int k = 0; k < m; ++k)
            symbol_[l * m + k] = kap[k] * mu[l] + mu[k] * kap[l];

    dst_ = std::make_unique<DstPlan>();
    dst_->m = m;
    dst_->buf = fftw_alloc_real(static_cast<size_t>(m) * m);
    dst_->plan = fftw_plan_r2r_2d(m, m, dst_->buf, dst_->buf, FFTW_RODFT00,
                                  FFTW_RODFT00, FFTW_ESTIMATE);
}

EllipticOperator::~EllipticOperator() = default;

void EllipticOperator::apply_full(const std::vector<double>& u,
                                  std::vector<double>& out) const {
    const int n = grid_.n;
    out.assign(static_cast<size_t>(n) * n, 0.0);
    parallel_rows(0, n, [&](int j) {
        for (int dj = -1; dj <= 1; ++dj) {
            if (j + dj < 0 || j + dj >= n) continue;
            for (int di = -1; di <= 1; ++di) {
                const std::vector<double>& plane = stencil_[(dj + 1) * 3 + (di + 1)];
                const int ilo = std::max(0, -di), ihi = n - 1 + std::min(0, -di);
                const int row = j * n, srow = (j + dj) * n + di;
                for (int i = ilo; i <= ihi; ++i)
                    out[row + i] += plane[row + i] * u[srow + i];
            }
        }
    });
}

double EllipticOperator::energy(const std::vector<double>& u) const {
    std::vector<double> au;
    apply_full(u, au);
    double s = 0.0;
    for (size_t k = 0; k < u.size(); ++k) s += u[k] * au[k];
    return 0.5 * s;
}

void EllipticOperator::apply_interior(const std::vector<double>& u,
                                      std::vector<double>& out) const {
    // u and out are full-size fields with zero boundary entries.
    const int n = grid_.n;
    parallel_rows(1, n - 1, [&](int j) {
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                const std::vector<double>& plane = stencil_[(dj + 1) * 3 + (di + 1)];
                const int row = j * n, srow = (j + dj) * n + di;
                if (di == -1 && dj == -1) {
                    for (int i = 1; i < n - 1; ++i) out[row + i] = plane[row + i] * u[srow + i];
                } else {
                    for (int i = 1; i < n - 1; ++i) out[row + i] += plane[row + i] * u[srow + i];
                }
            }
    });
}

void EllipticOperator::precondition(const std::vector<double>& r,
                                    std::vector<double>& z) const {
    const int n = grid_.n, m = dst_->m;
    double* buf = dst_->buf;
    for (int j = 0; j < m; ++j)
        std::memcpy(buf + static_cast<size_t>(j) * m, r.data() + (j + 1) * n + 1,
                    sizeof(double) * m);
    fftw_execute(dst_->plan);
    for (size_t k = 0; k < symbol_.size(); ++k) buf[k] /= symbol_[k];
    fftw_execute(dst_->plan);
    const double scale = 1.0 / (4.0 * (m + 1.0) * (m + 1.0));
    if (z.size() != r.size()) z.assign(r.size(), 0.0);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            z[(j + 1) * n + (i + 1)] = buf[static_cast<size_t>(j) * m + i] * scale;
}

EllipticOperator::SolveStats EllipticOperator::solve(const std::vector<double>& b,
                                                     std::vector<double>& u,
                                                     const std::vector<double>* g,
                                                     double rel_tol, int max_iter) const {
    const int n = grid_.n;
    const size_t sz = static_cast<size_t>(n) * n;
    if (b.size() != sz) throw ValidationError("solve: load size mismatch");
    if (u.size() != sz) u.assign(sz, 0.0);

    auto interior_dot = [&](const std::vector<double>& a, const std::vector<double>& c) {
        double s = 0.0;
        for (int j = 1; j < n - 1; ++j)
            for (int i = 1; i < n - 1; ++i) s += a[j * n + i] * c[j * n + i];
        return s;
    };

    // Dirichlet lift: unknowns are interior corrections over the boundary data.
    std::vector<double> rhs = b;
    std::vector<double> x(sz, 0.0);
    if (g) {
        std::vector<double> gfield(sz, 0.0), ag;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (grid_.boundary(i, j)) gfield[j * n + i] = (*g)[j * n + i];
        apply_full(gfield, ag);
        for (int j = 1; j < n - 1; ++j)
            for (int i = 1; i < n - 1; ++i) rhs[j * n + i] -= ag[j * n + i];
    }
    // Initial guess: interior part of u.
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) x[j * n + i] = u[j * n + i];

    std::vector<double> r(sz, 0.0), z(sz, 0.0), p(sz, 0.0), ap(sz, 0.0);
    apply_interior(x, ap);
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) r[j * n + i] = rhs[j * n + i] - ap[j * n + i];

    const double bnorm = std::sqrt(interior_dot(rhs, rhs));
    SolveStats stats;
    if (bnorm == 0.0) {
        u.assign(sz, 0.0);
        if (g)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    if (grid_.boundary(i, j)) u[j * n + i] = (*g)[j * n + i];
        return stats;
    }

    precondition(r, z);
    p = z;
    double rz = interior_dot(r, z);
    double rnorm = std::sqrt(interior_dot(r, r));
    int it = 0;
    while (rnorm > rel_tol * bnorm && it < max_iter) {
        apply_interior(p, ap);
        const double alpha = rz / interior_dot(p, ap);
        for (int j = 1; j < n - 1; ++j)
            for (int i = 1; i < n - 1; ++i) {
                x[j * n + i] += alpha * p[j * n + i];
                r[j * n + i] -= alpha * ap[j * n + i];
            }
        precondition(r, z);
        const double rz_new = interior_dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int j = 1; j < n - 1; ++j)
            for (int i = 1; i < n - 1; ++i)
                p[j * n + i] = z[j * n + i] + beta * p[j * n + i];
        rnorm = std::sqrt(interior_dot(r, r));
        ++it;
    }
    stats.iterations = it;
    stats.relative_residual = rnorm / bnorm;
    if (rnorm > rel_tol * bnorm)
        throw SolverError("conjugate gradient did not converge: rel residual " +
                          std::to_string(stats.relative_residual));

    u = x;
    if (g)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (grid_.boundary(i, j)) u[j * n + i] = (*g)[j * n + i];
    return stats;
}

EllipticOperator::SolveStats EllipticOperator::solve_shifted(
    const std::vector<double>& shift, const std::vector<double>& b, std::vector<double>& u,
    double rel_tol, int max_iter, const std::vector<std::vector<double>>* border,
    std::vector<double>* multipliers) const {
    const int n = grid_.n;
    const size_t sz = static_cast<size_t>(n) * n;
    const int m = border ? static_cast<int>(border->size()) : 0;
    const size_t tot = sz + m;
    if (b.size() != sz || shift.size() != sz)
        throw ValidationError("solve_shifted: size mismatch");
    u.assign(sz, 0.0);
    if (multipliers) multipliers->assign(m, 0.0);

    // Augmented vectors carry the border multipliers in the last m slots.
    auto inner_dot = [&](const std::vector<double>& a, const std::vector<double>& c) {
        double s = 0.0;
        for (int j = 1; j < n - 1; ++j)
            for (int i = 1; i < n - 1; ++i) s += a[j * n + i] * c[j * n + i];
        for (int k = 0; k < m; ++k) s += a[sz + k] * c[sz + k];
        return s;
    };
    auto apply_J = [&](const std::vector<double>& x, std::vector<double>& out) {
        apply_interior(x, out);
        for (int j = 1; j < n - 1; ++j)
            for (int i = 1; i < n - 1; ++i) out[j * n + i] -= shift[j * n + i] * x[j * n + i];
        for (int k = 0; k < m; ++k) {
            const std::vector<double>& q = (*border)[k];
            double qx = 0.0;
            for (int j = 1; j < n - 1; ++j)
                for (int i = 1; i < n - 1; ++i) {
                    out[j * n + i] += q[j * n + i] * x[sz + k];
                    qx += q[j * n + i] * x[j * n + i];
                }
            out[sz + k] = qx;
        }
    };
    auto apply_M = [&](const std::vector<double>& r, std::vector<double>& z) {
        precondition(r, z);  // writes the grid part
        for (int k = 0; k < m; ++k) z[sz + k] = r[sz + k];
    };

    // Preconditioned MINRES (Paige/Saunders), SPD preconditioner.
    std::vector<double> r1(tot, 0.0), r2(tot, 0.0), y(tot, 0.0), v(tot, 0.0), av(tot, 0.0);
    std::vector<double> w(tot, 0.0), w1(tot, 0.0), w2(tot, 0.0), x(tot, 0.0);
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) r1[j * n + i] = r2[j * n + i] = b[j * n + i];
    apply_M(r1, y);
    double beta1 = inner_dot(r1, y);
    SolveStats stats;
    if (beta1 <= 0.0) return stats;
    beta1 = std::sqrt(beta1);

    double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
    double cs = -1.0, sn = 0.0, oldeps = 0.0;
    int it = 0;
    while (it < max_iter && phibar > rel_tol * beta1) {
        ++it;
        const double s = 1.0 / beta;
        for (size_t k = 0; k < tot; ++k) v[k] = s * y[k];
        apply_J(v, av);
        if (it >= 2)
            for (size_t k = 0; k < tot; ++k) av[k] -= (beta / oldb) * r1[k];
        const double alfa = inner_dot(v, av);
        for (size_t k = 0; k < tot; ++k) av[k] -= (alfa / beta) * r2[k];
        r1 = r2;
        r2 = av;
        apply_M(r2, y);
        oldb = beta;
        beta = inner_dot(r2, y);
        if (beta < 0.0) throw SolverError("solve_shifted: preconditioner lost definiteness");
        beta = std::sqrt(beta);

        oldeps = epsln;
        const double delta = cs * dbar + sn * alfa;
        const double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        double gamma = std::sqrt(gbar * gbar + beta * beta);
        gamma = std::max(gamma, 1e-300);
        cs = gbar / gamma;
        sn = beta / gamma;
        const double phi = cs * phibar;
        phibar = sn * phibar;

        w1 = w2;
        w2 = w;
        for (int j = 1; j < n - 1; ++j)
            for (int i = 1; i < n - 1; ++i) {
                const size_t k = static_cast<size_t>(j) * n + i;
                w[k] = (v[k] - oldeps * w1[k] - delta * w2[k]) / gamma;
                x[k] += phi * w[k];
            }
        for (int k = 0; k < m; ++k) {
            w[sz + k] = (v[sz + k] - oldeps * w1[sz + k] - delta * w2[sz + k]) / gamma;
            x[sz + k] += phi * w[sz + k];
        }
    }
    stats.iterations = it;
    stats.relative_residual = phibar / beta1;
    if (phibar > rel_tol * beta1)
        throw SolverError("solve_shifted: MINRES did not converge");
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) u[j * n + i] = x[j * n + i];
    if (multipliers)
        for (int k = 0; k < m; ++k) (*multipliers)[k] = x[sz + k];
    return stats;
}

std::vector<double> EllipticOperator::dirac_load(Vec2 y, Vec2* y_eff) const {
    if (!grid_.contains(y)) throw DomainError("dirac_load: source outside grid");
    const int n = grid_.n;
    int ci, cj;
    grid_.locate_cell(y, ci, cj);
    if (y_eff) *y_eff = grid_.cell_center(ci, cj);
    std::vector<double> b(static_cast<size_t>(n) * n, 0.0);
    // Uniform unit density on the cell: int (1/h^2) phi_i = 1/4 per corner.
    for (int p = 0; p < 4; ++p)
        b[grid_.index(ci + LOCAL_DI[p], cj + LOCAL_DJ[p])] = 0.25;
    return b;
}

std::vector<double> EllipticOperator::function_load(
    const std::function<double(Vec2)>& f) const {
    const int n = grid_.n;
    const double h = grid_.spacing();
    std::vector<double> b(static_cast<size_t>(n) * n, 0.0);
    for (int cj = 0; cj < n - 1; ++cj)
        for (int ci = 0; ci < n - 1; ++ci) {
            const double x0 = grid_.x(ci), y0 = grid_.x(cj);
            for (int gx = 0; gx < 2; ++gx)
                for (int gy = 0; gy < 2; ++gy) {
                    const double xi = GP[gx], eta = GP[gy];
                    const double fv = f({x0 + xi * h, y0 + eta * h}) * h * h * 0.25;
                    const double sh[4] = {(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta,
                                          (1 - xi) * eta};
                    for (int p = 0; p < 4; ++p)
                        b[grid_.index(ci + LOCAL_DI[p], cj + LOCAL_DJ[p])] += fv * sh[p];
                }
        }
    return b;
}

std::vector<double> EllipticOperator::divergence_load(
    const std::function<Vec2(Vec2)>& F) const {
    const int n = grid_.n;
    const double h = grid_.spacing();
    std::vector<double> b(static_cast<size_t>(n) * n, 0.0);
    for (int cj = 0; cj < n - 1; ++cj)
        for (int ci = 0; ci < n - 1; ++ci) {
            const double x0 = grid_.x(ci), y0 = grid_.x(cj);
            for (int gx = 0; gx < 2; ++gx)
                for (int gy = 0; gy < 2; ++gy) {
                    const double xi = GP[gx], eta = GP[gy];
                    const Vec2 Fv = F({x0 + xi * h, y0 + eta * h}) * (h * h * 0.25);
                    // grad phi on the physical cell.
                    const double gxs[4] = {-(1 - eta) / h, (1 - eta) / h, eta / h, -eta / h};
                    const double gys[4] = {-(1 - xi) / h, -xi / h, xi / h, (1 - xi) / h};
                    for (int p = 0; p < 4; ++p)
                        b[grid_.index(ci + LOCAL_DI[p], cj + LOCAL_DJ[p])] -=
                            Fv.x * gxs[p] + Fv.y * gys[p];
                }
        }
    return b;
}

}  // namespace helix
