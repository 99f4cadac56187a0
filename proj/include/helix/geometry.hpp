#ifndef HELIX_GEOMETRY_HPP
#define HELIX_GEOMETRY_HPP

#include <array>
#include <cmath>

namespace helix {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
    // (x,y)^perp = (y,-x), clockwise quarter turn
    Vec2 perp() const { return {y, -x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// 2x2 matrix, row major
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    Mat2() = default;
    Mat2(double m11, double m12, double m21, double m22)
        : a11(m11), a12(m12), a21(m21), a22(m22) {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

    Vec2 operator*(const Vec2& v) const {
        return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
    }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }

    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    double det() const { return a11 * a22 - a12 * a21; }
    double operator()(int i, int j) const {
        return i == 0 ? (j == 0 ? a11 : a12) : (j == 0 ? a21 : a22);
    }
    double max_abs() const {
        return std::max(std::max(std::fabs(a11), std::fabs(a12)),
                        std::max(std::fabs(a21), std::fabs(a22)));
    }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

// Eigen-decomposition of a symmetric 2x2 matrix. Returns eigenvalues
// (ascending) and an orthonormal pair of eigenvectors.
struct SymEig2 {
    double lambda1, lambda2;  // lambda1 <= lambda2
    Vec2 v1, v2;
};

inline SymEig2 sym_eig(const Mat2& m) {
    const double a = m.a11, b = 0.5 * (m.a12 + m.a21), c = m.a22;
    const double tr = a + c;
    const double d = std::sqrt(std::max(0.0, 0.25 * (a - c) * (a - c) + b * b));
    SymEig2 e;
    e.lambda1 = 0.5 * tr - d;
    e.lambda2 = 0.5 * tr + d;
    if (std::fabs(b) > 1e-300) {
        Vec2 v{e.lambda2 - c, b};
        double n = v.norm();
        if (n < 1e-300) { v = {b, e.lambda2 - a}; n = v.norm(); }
        e.v2 = v / n;
    } else {
        e.v2 = (a >= c) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    }
    e.v1 = {-e.v2.y, e.v2.x};
    return e;
}

// f(M) for symmetric positive definite M through its eigen-decomposition.
template <class F>
Mat2 spd_function(const Mat2& m, F&& f) {
    SymEig2 e = sym_eig(m);
    const double f1 = f(e.lambda1), f2 = f(e.lambda2);
    return {f1 * e.v1.x * e.v1.x + f2 * e.v2.x * e.v2.x,
            f1 * e.v1.x * e.v1.y + f2 * e.v2.x * e.v2.y,
            f1 * e.v1.y * e.v1.x + f2 * e.v2.y * e.v2.x,
            f1 * e.v1.y * e.v1.y + f2 * e.v2.y * e.v2.y};
}

}  // namespace helix

#endif
