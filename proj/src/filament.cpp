#include "helix/filament.hpp"

#include <cmath>

#include "helix/errors.hpp"

namespace helix {

namespace {

bool is_power_of_two(int m) { return m >= 1 && (m & (m - 1)) == 0; }

// In-place iterative radix-2 FFT; sign = -1 forward, +1 inverse (unscaled).
void fft(std::vector<Complex>& a, int sign) {
    const int n = static_cast<int>(a.size());
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / len;
        const Complex wl(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (int k = 0; k < len / 2; ++k) {
                const Complex u = a[i + k];
                const Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}  // namespace

void FilamentEnsemble::validate() const {
    if (positions.empty()) throw ValidationError("ensemble has no filaments");
    const int m = modes();
    if (!is_power_of_two(m) || m < 8)
        throw ValidationError("sample count M must be a power of two >= 8");
    for (const auto& x : positions)
        if (static_cast<int>(x.size()) != m)
            throw ValidationError("all filaments must share the sample count");
    if (static_cast<int>(circulations.size()) != count())
        throw ValidationError("circulation count mismatch");
    if (!structure_constants.empty() &&
        static_cast<int>(structure_constants.size()) != count())
        throw ValidationError("structure constant count mismatch");
    if (!(period > 0.0)) throw ValidationError("period must be positive");
}

std::vector<Complex> spectral_second_derivative(const std::vector<Complex>& x,
                                                double period) {
    std::vector<Complex> a = x;
    const int m = static_cast<int>(a.size());
    fft(a, -1);
    const double base = 2.0 * M_PI / period;
    for (int k = 0; k < m; ++k) {
        const int kk = (k <= m / 2) ? k : k - m;
        const double w = base * kk;
        a[k] *= -w * w / m;
    }
    fft(a, +1);
    return a;
}

double min_separation(const FilamentEnsemble& e) {
    const int n = e.count(), m = e.modes();
    double best = 1e300;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
            for (int s = 0; s < m; ++s)
                best = std::min(best, std::abs(e.positions[j][s] - e.positions[k][s]));
    return n > 1 ? best : 1e300;
}

std::vector<std::vector<Complex>> kmd_rhs(const FilamentEnsemble& e,
                                          double collision_floor) {
    const int n = e.count(), m = e.modes();
    if (min_separation(e) < collision_floor)
        throw CollisionError("filament separation below collision floor");

    const Complex I(0.0, 1.0);
    std::vector<std::vector<Complex>> out(n);
    for (int j = 0; j < n; ++j) {
        const double aj = e.structure_constants.empty() ? 1.0 : e.structure_constants[j];
        const double kj = e.circulations[j];
        std::vector<Complex> d2 = spectral_second_derivative(e.positions[j], e.period);
        out[j].resize(m);
        for (int s = 0; s < m; ++s)
            out[j][s] = (I * (aj * kj)) * d2[s] / (4.0 * M_PI);
    }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            const double kk = e.circulations[k];
            for (int s = 0; s < m; ++s) {
                const Complex d = e.positions[j][s] - e.positions[k][s];
                out[j][s] += (I * (2.0 * kk)) * d / (std::norm(d) * 4.0 * M_PI);
            }
        }
    return out;
}

namespace {

void axpy(FilamentEnsemble& y, double a, const std::vector<std::vector<Complex>>& d) {
    for (size_t j = 0; j < y.positions.size(); ++j)
        for (size_t s = 0; s < y.positions[j].size(); ++s)
            y.positions[j][s] += a * d[j][s];
}

bool has_nan(const FilamentEnsemble& e) {
    for (const auto& f : e.positions)
        for (const Complex& z : f)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return true;
    return false;
}

}  // namespace

Trajectory kmd_integrate(const FilamentEnsemble& e0, double dt, double T,
                         int save_stride, double collision_floor) {
    e0.validate();
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    if (!(T >= dt)) throw ValidationError("T must be at least dt");
    if (save_stride < 1) save_stride = 1;

    const long nsteps = static_cast<long>(std::llround(T / dt));
    Trajectory traj;
    traj.taus.push_back(0.0);
    traj.states.push_back(e0);

    FilamentEnsemble y = e0;
    for (long step = 0; step < nsteps; ++step) {
        try {
            const auto k1 = kmd_rhs(y, collision_floor);
            FilamentEnsemble y2 = y;
            axpy(y2, 0.5 * dt, k1);
            const auto k2 = kmd_rhs(y2, collision_floor);
            FilamentEnsemble y3 = y;
            axpy(y3, 0.5 * dt, k2);
            const auto k3 = kmd_rhs(y3, collision_floor);
            FilamentEnsemble y4 = y;
            axpy(y4, dt, k3);
            const auto k4 = kmd_rhs(y4, collision_floor);
            axpy(y, dt / 6.0, k1);
            axpy(y, dt / 3.0, k2);
            axpy(y, dt / 3.0, k3);
            axpy(y, dt / 6.0, k4);
        } catch (const CollisionError&) {
            traj.collided = true;
            traj.collision_tau = step * dt;
            return traj;
        }
        if (has_nan(y)) throw BlowupError("kmd_integrate: NaN detected");
        if ((step + 1) % save_stride == 0 || step + 1 == nsteps) {
            traj.taus.push_back((step + 1) * dt);
            traj.states.push_back(y);
        }
    }
    return traj;
}

KmdDiagnostics kmd_diagnostics(const FilamentEnsemble& e) {
    const int n = e.count(), m = e.modes();
    const double w = e.period / m;  // trapezoid weight on the periodic grid
    if (n > 1 && min_separation(e) <= 0.0)
        throw CollisionError("coincident filaments in diagnostics");

    KmdDiagnostics d{};
    d.min_separation = min_separation(e);
    for (int j = 0; j < n; ++j) {
        const double kj = e.circulations[j];
        const double aj = e.structure_constants.empty() ? 1.0 : e.structure_constants[j];
        Complex mean(0.0, 0.0);
        double mom = 0.0;
        for (int s = 0; s < m; ++s) {
            mean += e.positions[j][s];
            mom += std::norm(e.positions[j][s]);
        }
        d.mean_vorticity_center += kj * mean * w;
        d.second_moment += kj * mom * w;

        // Self-induction energy: (a_j k_j^2 / 8 pi) int |X_j'|^2 ds, evaluated
        // spectrally as sum (2 pi k / L)^2 |Xhat_k|^2 L.
        std::vector<Complex> a = e.positions[j];
        fft(a, -1);
        const double base = 2.0 * M_PI / e.period;
        double grad2 = 0.0;
        for (int k = 0; k < m; ++k) {
            const int kk = (k <= m / 2) ? k : k - m;
            grad2 += base * base * kk * kk * std::norm(a[k]) / (double(m) * m);
        }
        d.hamiltonian += aj * kj * kj / (8.0 * M_PI) * grad2 * e.period;
    }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            double s_ln = 0.0;
            for (int s = 0; s < m; ++s)
                s_ln += std::log(std::abs(e.positions[j][s] - e.positions[k][s]));
            d.hamiltonian -= e.circulations[j] * e.circulations[k] / (4.0 * M_PI) * s_ln * w;
        }
    return d;
}

}  // namespace helix
