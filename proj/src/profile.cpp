#include "helix/profile.hpp"

#include <cmath>

#include "helix/errors.hpp"

namespace helix {

namespace {

// State along the radial ODE: y = (phi, phi', I_p, I_{p+1}) with the disk
// integrals accumulated as I_k' = 2 pi r phi_+^k.
struct OdeState {
    double phi, psi, ip, ip1;
};

OdeState rhs(double r, const OdeState& y, double p) {
    const double phip = y.phi > 0.0 ? std::pow(y.phi, p) : 0.0;
    OdeState d;
    d.phi = y.psi;
    d.psi = (r > 0.0) ? (-phip - y.psi / r) : (-0.5 * phip);
    d.ip = 2.0 * M_PI * r * phip;
    d.ip1 = 2.0 * M_PI * r * (y.phi > 0.0 ? std::pow(y.phi, p + 1.0) : 0.0);
    return d;
}

OdeState axpy(const OdeState& y, double a, const OdeState& d) {
    return {y.phi + a * d.phi, y.psi + a * d.psi, y.ip + a * d.ip, y.ip1 + a * d.ip1};
}

// One classical RK4 step.
OdeState rk4_step(double r, const OdeState& y, double h, double p) {
    const OdeState k1 = rhs(r, y, p);
    const OdeState k2 = rhs(r + 0.5 * h, axpy(y, 0.5 * h, k1), p);
    const OdeState k3 = rhs(r + 0.5 * h, axpy(y, 0.5 * h, k2), p);
    const OdeState k4 = rhs(r + h, axpy(y, h, k3), p);
    OdeState out = y;
    out.phi += h / 6.0 * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi);
    out.psi += h / 6.0 * (k1.psi + 2 * k2.psi + 2 * k3.psi + k4.psi);
    out.ip += h / 6.0 * (k1.ip + 2 * k2.ip + 2 * k3.ip + k4.ip);
    out.ip1 += h / 6.0 * (k1.ip1 + 2 * k2.ip1 + 2 * k3.ip1 + k4.ip1);
    return out;
}

// Integrate from the center with amplitude a to r = 1 on a fine fixed grid,
// optionally recording phi, phi' at uniformly spaced radii. Series start
// handles the phi'/r coordinate singularity: phi = a - (a^p/4) r^2 + O(r^4).
OdeState integrate(double a, double p, int samples, int substeps,
                   std::vector<double>* vals, std::vector<double>* derivs) {
    const double r0 = 1e-8;
    OdeState y{a - 0.25 * std::pow(a, p) * r0 * r0, -0.5 * std::pow(a, p) * r0,
               M_PI * r0 * r0 * std::pow(a, p), M_PI * r0 * r0 * std::pow(a, p + 1.0)};
    const int steps = samples * substeps;
    const double h = (1.0 - r0) / steps;
    if (vals) {
        vals->push_back(a);
        derivs->push_back(0.0);
    }
    double r = r0;
    for (int i = 0; i < steps; ++i) {
        y = rk4_step(r, y, h, p);
        r = r0 + (i + 1) * h;
        if (vals && (i + 1) % substeps == 0) {
            vals->push_back(y.phi);
            derivs->push_back(y.psi);
        }
    }
    return y;
}

}  // namespace

ProfileTable solve_profile(double p, int samples) {
    if (!(p > 1.0 && p <= 6.0)) throw DomainError("solve_profile: need 1 < p <= 6");

    // phi(1; a) is decreasing in a near the root (larger amplitude pulls the
    // first zero inward), so bracket and bisect on the amplitude.
    const int substeps = 20;
    auto end_value = [&](double a) {
        return integrate(a, p, samples, substeps, nullptr, nullptr).phi;
    };

    double lo = 1.0, hi = 2.0;
    while (end_value(lo) < 0.0) lo *= 0.5;
    while (end_value(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e8) throw SolverError("solve_profile: amplitude bracket failure");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (end_value(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13 * hi) break;
    }
    double a = 0.5 * (lo + hi);
    // Secant polish on phi(1; a).
    {
        double a1 = lo, a2 = hi;
        double f1 = end_value(a1), f2 = end_value(a2);
        for (int it = 0; it < 60 && std::fabs(f2) > 1e-13 && f2 != f1; ++it) {
            const double a3 = a2 - f2 * (a2 - a1) / (f2 - f1);
            a1 = a2; f1 = f2;
            a2 = a3; f2 = end_value(a3);
        }
        if (std::fabs(f2) <= std::fabs(end_value(a))) a = a2;
    }
    if (std::fabs(end_value(a)) > 1e-12)
        throw SolverError("solve_profile: bisection did not reach phi(1)=0 tolerance");

    ProfileTable t;
    t.p_ = p;
    t.amplitude_ = a;
    t.vals_.reserve(samples + 1);
    t.derivs_.reserve(samples + 1);
    const OdeState yend = integrate(a, p, samples, substeps, &t.vals_, &t.derivs_);
    t.dr_ = 1.0 / (static_cast<int>(t.vals_.size()) - 1);
    t.slope_ = yend.psi;
    t.int_p_ = yend.ip;
    t.int_p1_ = yend.ip1;
    if (!(t.slope_ < 0.0)) throw SolverError("solve_profile: nonnegative boundary slope");
    t.vals_.back() = 0.0;
    return t;
}

double ProfileTable::phi(double r) const {
    if (r >= 1.0) return 0.0;
    if (r <= 0.0) return amplitude_;
    const double s = r / dr_;
    const int i = std::min(static_cast<int>(s), static_cast<int>(vals_.size()) - 2);
    const double u = s - i;
    const double h = dr_;
    const double y0 = vals_[i], y1 = vals_[i + 1];
    const double m0 = derivs_[i] * h, m1 = derivs_[i + 1] * h;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * m0 +
           (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * m1;
}

double ProfileTable::phi_prime(double r) const {
    if (r >= 1.0) return slope_;
    if (r <= 0.0) return 0.0;
    const double s = r / dr_;
    const int i = std::min(static_cast<int>(s), static_cast<int>(vals_.size()) - 2);
    const double u = s - i;
    const double h = dr_;
    const double y0 = vals_[i], y1 = vals_[i + 1];
    const double m0 = derivs_[i], m1 = derivs_[i + 1];
    const double u2 = u * u;
    return ((6 * u2 - 6 * u) * y0 / h + (3 * u2 - 4 * u + 1) * m0 +
            (-6 * u2 + 6 * u) * y1 / h + (3 * u2 - 2 * u) * m1);
}

double solve_core_radius(double eps, double qhat, const ProfileTable& table) {
    if (!(eps > 0.0 && eps < 0.5)) throw DomainError("solve_core_radius: eps outside (0, 0.5)");
    if (!(qhat > 0.0)) throw DomainError("solve_core_radius: qhat must be positive");

    const double p = table.p();
    const double slope = table.slope_at_one();  // negative
    const double e = 2.0 / (p - 1.0);
    const double lne = std::log(eps);

    // Residual in t = ln s:  F(t) = phi'(1) e^{e (ln eps - t)} + qhat ln eps / t.
    auto F = [&](double t) { return slope * std::exp(e * (lne - t)) + qhat * lne / t; };
    auto dF = [&](double t) { return -e * slope * std::exp(e * (lne - t)) - qhat * lne / (t * t); };

    double tlo = 2.0 * lne;        // s = eps^2
    double thi = 0.5 * lne;        // s = sqrt(eps)
    if (F(tlo) * F(thi) > 0.0) throw SolverError("solve_core_radius: no root in (eps^2, sqrt(eps))");
    if (F(tlo) > 0.0) std::swap(tlo, thi);

    double t = lne + 0.5 * (p - 1.0) * std::log(-slope / qhat);  // s0 = eps (|phi'(1)|/qhat)^{(p-1)/2}
    if (!(t > std::min(tlo, thi) && t < std::max(tlo, thi))) t = 0.5 * (tlo + thi);
    for (int it = 0; it < 100; ++it) {
        const double f = F(t);
        if (f > 0.0) thi = t;
        else tlo = t;
        const double d = dF(t);
        double tn = t - f / d;
        const double a = std::min(tlo, thi), b = std::max(tlo, thi);
        if (!(tn > a && tn < b)) tn = 0.5 * (tlo + thi);
        if (std::fabs(tn - t) < 1e-16 * std::fabs(t)) { t = tn; break; }
        t = tn;
    }
    const double s = std::exp(t);
    const double resid = std::fabs(std::pow(eps / s, e) * slope - qhat * std::log(1.0 / eps) / std::log(s));
    if (resid > 1e-14 * std::max(1.0, qhat * std::fabs(lne / t)))
        throw SolverError("solve_core_radius: Newton residual above tolerance");
    return s;
}

}  // namespace helix
