#include <cmath>
#include <random>

#include "doctest.h"
#include "helix/elliptic.hpp"
#include "helix/errors.hpp"

using namespace helix;

namespace {

// sine mode vanishing on the boundary of [-R, R]^2
double mode(Vec2 p, double R, int mx, int my) {
    return std::sin(mx * M_PI * (p.x + R) / (2 * R)) *
           std::sin(my * M_PI * (p.y + R) / (2 * R));
}

}  // namespace

TEST_CASE("assembled operator is symmetric") {
    const Grid g(1.0, 33);
    const CoefficientField f = CoefficientField::helical(1.0, 1.0);
    const EllipticOperator op(g, f);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> u(g.n * g.n), v(g.n * g.n), au, av;
        for (auto& x : u) x = d(rng);
        for (auto& x : v) x = d(rng);
        op.apply_full(u, au);
        op.apply_full(v, av);
        double vau = 0.0, uav = 0.0;
        for (size_t k = 0; k < u.size(); ++k) {
            vau += v[k] * au[k];
            uav += u[k] * av[k];
        }
        CHECK(vau == doctest::Approx(uav).epsilon(1e-12));
    }
}

TEST_CASE("operator is positive on Dirichlet fields") {
    const Grid g(1.0, 17);
    const CoefficientField f = CoefficientField::helical(0.8, 1.0);
    const EllipticOperator op(g, f);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> u(g.n * g.n, 0.0);
        for (int j = 1; j < g.n - 1; ++j)
            for (int i = 1; i < g.n - 1; ++i) u[g.index(i, j)] = d(rng);
        CHECK(op.energy(u) > 0.0);
    }
}

TEST_CASE("identity-coefficient solves converge in a few iterations") {
    const Grid g(1.0, 65);
    const CoefficientField f = CoefficientField::identity(1.0);
    const EllipticOperator op(g, f);
    const std::vector<double> b = op.function_load([&](Vec2 p) { return mode(p, 1.0, 1, 1); });
    std::vector<double> u;
    const auto stats = op.solve(b, u);
    CHECK(stats.iterations <= 3);
}

TEST_CASE("manufactured solution, identity field, second order") {
    // -Laplace u = lambda u with u a product sine mode.
    auto run = [&](int n) {
        const Grid g(1.0, n);
        const CoefficientField f = CoefficientField::identity(1.0);
        const EllipticOperator op(g, f);
        const double lam = 2.0 * std::pow(M_PI / 2.0, 2);
        const std::vector<double> b =
            op.function_load([&](Vec2 p) { return lam * mode(p, 1.0, 1, 1); });
        std::vector<double> u;
        op.solve(b, u, nullptr, 1e-12);
        double err = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                err = std::max(err, std::fabs(u[g.index(i, j)] - mode(g.node(i, j), 1.0, 1, 1)));
        return err;
    };
    const double e65 = run(65), e129 = run(129);
    CHECK(e65 / e129 > 3.0);
    CHECK(e65 / e129 < 5.0);
}

TEST_CASE("manufactured solution, helical field, second order") {
    const CoefficientField f = CoefficientField::helical(1.0, 1.0);
    auto exact = [&](Vec2 p) { return mode(p, 1.0, 2, 1); };
    auto rhs = [&](Vec2 p) {
        // -div(K grad u) expanded with analytic K derivatives
        const double R = 1.0;
        const double ax = 2 * M_PI / (2 * R), ay = M_PI / (2 * R);
        const double sx = std::sin(ax * (p.x + R)), cx = std::cos(ax * (p.x + R));
        const double sy = std::sin(ay * (p.y + R)), cy = std::cos(ay * (p.y + R));
        const double ux = ax * cx * sy, uy = ay * sx * cy;
        const double uxx = -ax * ax * sx * sy, uyy = -ay * ay * sx * sy;
        const double uxy = ax * ay * cx * cy;
        const Mat2 K = f.eval_metric(p).K;
        Mat2 d1, d2;
        f.metric_derivatives(p, d1, d2);
        return -(d1.a11 * ux + K.a11 * uxx + d1.a12 * uy + K.a12 * uxy + d2.a21 * ux +
                 K.a21 * uxy + d2.a22 * uy + K.a22 * uyy);
    };
    auto run = [&](int n) {
        const Grid g(1.0, n);
        const EllipticOperator op(g, f);
        const std::vector<double> b = op.function_load(rhs);
        std::vector<double> u;
        op.solve(b, u, nullptr, 1e-12);
        double err = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                err = std::max(err, std::fabs(u[g.index(i, j)] - exact(g.node(i, j))));
        return err;
    };
    const double e65 = run(65), e129 = run(129);
    CHECK(e65 / e129 > 3.0);
    CHECK(e65 / e129 < 5.0);
}

TEST_CASE("dirichlet lift reproduces a harmonic function") {
    // u = x1 x2 is harmonic; solve with its boundary data and zero load.
    const Grid g(1.0, 33);
    const CoefficientField f = CoefficientField::identity(1.0);
    const EllipticOperator op(g, f);
    std::vector<double> bc(g.n * g.n, 0.0), b(g.n * g.n, 0.0), u;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            if (g.boundary(i, j)) bc[g.index(i, j)] = g.node(i, j).x * g.node(i, j).y;
    op.solve(b, u, &bc, 1e-12);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            CHECK(std::fabs(u[g.index(i, j)] - g.node(i, j).x * g.node(i, j).y) < 1e-9);
}

TEST_CASE("dirac load is a unit measure on the nearest cell") {
    const Grid g(1.0, 17);
    const CoefficientField f = CoefficientField::identity(1.0);
    const EllipticOperator op(g, f);
    Vec2 eff;
    const std::vector<double> b = op.dirac_load({0.13, -0.41}, &eff);
    double sum = 0.0;
    int nonzero = 0;
    for (double v : b) {
        sum += v;
        if (v != 0.0) ++nonzero;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(nonzero == 4);
    CHECK(eff.x == doctest::Approx(g.nearest_cell_center({0.13, -0.41}).x));
}

TEST_CASE("divergence load agrees with the function load of the divergence") {
    const Grid g(1.0, 33);
    const CoefficientField f = CoefficientField::identity(1.0);
    const EllipticOperator op(g, f);
    // F = grad psi with psi a sine mode: div F = Laplace psi.
    auto F = [&](Vec2 p) -> Vec2 {
        const double a = M_PI / 2.0;
        return {a * std::cos(a * (p.x + 1)) * std::sin(a * (p.y + 1)),
                a * std::sin(a * (p.x + 1)) * std::cos(a * (p.y + 1))};
    };
    auto divF = [&](Vec2 p) {
        const double a = M_PI / 2.0;
        return -2 * a * a * std::sin(a * (p.x + 1)) * std::sin(a * (p.y + 1));
    };
    const std::vector<double> b1 = op.divergence_load(F);
    const std::vector<double> b2 = op.function_load(divF);
    const double h = g.spacing();
    for (int j = 2; j < g.n - 2; ++j)
        for (int i = 2; i < g.n - 2; ++i)
            CHECK(std::fabs(b1[g.index(i, j)] - b2[g.index(i, j)]) < 2e-2 * h * h);
}

TEST_CASE("solve validates input sizes") {
    const Grid g(1.0, 17);
    const CoefficientField f = CoefficientField::identity(1.0);
    const EllipticOperator op(g, f);
    std::vector<double> b(5, 0.0), u;
    CHECK_THROWS_AS(op.solve(b, u), ValidationError);
}
