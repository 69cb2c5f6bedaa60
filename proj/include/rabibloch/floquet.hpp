// floquet.hpp — Floquet analysis of the plane-wave-reduced driven two-level
// problem: one-period propagator (monodromy), quasi-energies, the phi-averaged
// splitting, and the predicted spectral line comb m*omega0 + n*Omega_B + p*mean.
//
// Branch handling: the quasi-energies are defined modulo the drive frequency.
// Folded values live in (-w/2, w/2]. For the physical splitting the pair is
// seeded at phi = pi/2 (where the tunneling shift vanishes) by the integer-w
// offsets that bring nu1 - nu2 closest to the RWA dressed splitting, and
// continued across phi by eigenvector overlap; a plain smallest-distance rule
// mis-pairs once the splitting exceeds w/2.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "rabibloch/analytics.hpp"
#include "rabibloch/core.hpp"
#include "rabibloch/dynamics.hpp"

namespace rabibloch {

// Small dense complex 2x2, row-major {m00, m01, m10, m11}.
struct Mat2 {
    std::array<Complex, 4> m{};

    static Mat2 identity() { return {{Complex(1, 0), {}, {}, Complex(1, 0)}}; }
    Complex& operator()(int r, int c) { return m[2 * r + c]; }
    const Complex& operator()(int r, int c) const { return m[2 * r + c]; }

    Mat2 operator*(const Mat2& o) const {
        Mat2 r;
        r.m[0] = m[0] * o.m[0] + m[1] * o.m[2];
        r.m[1] = m[0] * o.m[1] + m[1] * o.m[3];
        r.m[2] = m[2] * o.m[0] + m[3] * o.m[2];
        r.m[3] = m[2] * o.m[1] + m[3] * o.m[3];
        return r;
    }
    Mat2 adjoint() const {
        return {{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]),
                 std::conj(m[3])}};
    }
    Complex trace() const { return m[0] + m[3]; }
    Complex det() const { return m[0] * m[3] - m[1] * m[2]; }
};

inline double frobenius_distance_from_identity(const Mat2& g) {
    double s = 0.0;
    s += std::norm(g.m[0] - Complex(1, 0));
    s += std::norm(g.m[1]);
    s += std::norm(g.m[2]);
    s += std::norm(g.m[3] - Complex(1, 0));
    return std::sqrt(s);
}

// Reduced Hamiltonian of the plane-wave ansatz a_p = a~ e^{i p phi} at zero
// tilt: rows [w0/2 + 2 t_a cos(phi), -Omega_R cos(wt); ., -w0/2 + 2 t_b cos(phi)].
inline Mat2 reduced_hamiltonian(double phi, double t, const ChainParams& p) {
    const double c = std::cos(phi);
    const double od = -p.rabi * std::cos(p.drive_freq * t);
    Mat2 h;
    h(0, 0) = Complex(0.5 * p.omega0 + 2.0 * p.t_a * c, 0.0);
    h(0, 1) = Complex(od, 0.0);
    h(1, 0) = Complex(od, 0.0);
    h(1, 1) = Complex(-0.5 * p.omega0 + 2.0 * p.t_b * c, 0.0);
    return h;
}

// Step count keeping the one-period unitarity error well under 1e-10 for the
// reduced problem's spectral radius; never below 4096.
inline int monodromy_auto_steps(const ChainParams& p) {
    const double lam = 0.5 * p.omega0 +
                       2.0 * std::max(std::abs(p.t_a), std::abs(p.t_b)) + p.rabi;
    const double T = 2.0 * M_PI / p.drive_freq;
    double need = T * lam / 0.005;
    int steps = 4096;
    while (steps < need && steps < (1 << 22)) steps <<= 1;
    return steps;
}

// Time-ordered propagator over one drive period T = 2 pi / w by RK4 on the
// matrix ODE i dM/dt = H(t) M, M(0) = 1. steps_per_period <= 0 selects the
// auto step count. Throws when the result fails the unitarity budget.
inline Mat2 monodromy(double phi, const ChainParams& p,
                      int steps_per_period = 0) {
    if (!(p.drive_freq > 0.0))
        throw std::invalid_argument("monodromy requires drive_freq > 0");
    if (steps_per_period <= 0) steps_per_period = monodromy_auto_steps(p);
    if (steps_per_period < 16)
        throw std::invalid_argument("steps_per_period too small");
    const double T = 2.0 * M_PI / p.drive_freq;
    const double h = T / steps_per_period;
    const Complex mi(0.0, -1.0);
    auto rhs = [&](const Mat2& m, double t) {
        Mat2 r = reduced_hamiltonian(phi, t, p) * m;
        for (auto& z : r.m) z *= mi;
        return r;
    };
    auto axpy = [](const Mat2& m, double s, const Mat2& d) {
        Mat2 r = m;
        for (int i = 0; i < 4; ++i) r.m[i] += s * d.m[i];
        return r;
    };
    Mat2 m = Mat2::identity();
    for (int k = 0; k < steps_per_period; ++k) {
        const double t = k * h;
        const Mat2 k1 = rhs(m, t);
        const Mat2 k2 = rhs(axpy(m, 0.5 * h, k1), t + 0.5 * h);
        const Mat2 k3 = rhs(axpy(m, 0.5 * h, k2), t + 0.5 * h);
        const Mat2 k4 = rhs(axpy(m, h, k3), t + h);
        for (int i = 0; i < 4; ++i)
            m.m[i] += (h / 6.0) * (k1.m[i] + 2.0 * k2.m[i] + 2.0 * k3.m[i] +
                                   k4.m[i]);
    }
    if (frobenius_distance_from_identity(m.adjoint() * m) > 1e-8)
        throw NumericalError(
            "monodromy lost unitarity; increase steps_per_period");
    return m;
}

namespace detail {

struct EigenPair2 {
    Complex value;
    std::array<Complex, 2> vector;
};

// Eigen decomposition of a 2x2 by the quadratic formula.
inline std::array<EigenPair2, 2> eigen_2x2(const Mat2& m) {
    const Complex tr = m.trace();
    const Complex disc = std::sqrt(tr * tr - 4.0 * m.det());
    const std::array<Complex, 2> vals{0.5 * (tr + disc), 0.5 * (tr - disc)};
    std::array<EigenPair2, 2> out;
    for (int i = 0; i < 2; ++i) {
        const Complex lam = vals[i];
        std::array<Complex, 2> v1{m(0, 1), lam - m(0, 0)};
        std::array<Complex, 2> v2{lam - m(1, 1), m(1, 0)};
        const double n1 = std::norm(v1[0]) + std::norm(v1[1]);
        const double n2 = std::norm(v2[0]) + std::norm(v2[1]);
        std::array<Complex, 2> v = n1 >= n2 ? v1 : v2;
        double nn = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
        if (nn == 0.0) {  // scalar matrix
            v = {Complex(i == 0 ? 1.0 : 0.0, 0.0), Complex(i == 0 ? 0.0 : 1.0, 0.0)};
            nn = 1.0;
        }
        out[i] = {lam, {v[0] / nn, v[1] / nn}};
    }
    return out;
}

inline double overlap(const std::array<Complex, 2>& u,
                      const std::array<Complex, 2>& v) {
    return std::abs(std::conj(u[0]) * v[0] + std::conj(u[1]) * v[1]);
}

// Fold x into (-w/2, w/2].
inline double fold_zone(double x, double w) {
    double y = std::remainder(x, w);  // [-w/2, w/2]
    if (y <= -0.5 * w) y += w;
    return y;
}

}  // namespace detail

struct QuasiEnergyPair {
    double phi = 0.0;
    double nu1 = 0.0;        // folded to (-w/2, w/2], nu1 >= nu2
    double nu2 = 0.0;
    double unwrapped1 = 0.0;  // representatives carrying the physical splitting
    double unwrapped2 = 0.0;
    bool degenerate = false;
};

namespace detail {

struct TrackedPair {
    QuasiEnergyPair q;
    std::array<Complex, 2> vec1, vec2;
};

// Quasi-energies at one phi along with the monodromy eigenvectors. The
// unwrapped representatives are chosen so their difference is the realizable
// splitting closest to `seed` (nu1 above nu2).
inline TrackedPair quasi_energies_tracked(double phi, const ChainParams& p,
                                          int steps, double seed) {
    const double w = p.drive_freq;
    const double T = 2.0 * M_PI / w;
    const Mat2 m = monodromy(phi, p, steps);
    const auto eig = eigen_2x2(m);

    TrackedPair out;
    out.q.phi = phi;
    out.q.degenerate = std::abs(eig[0].value - eig[1].value) < 1e-12;

    const double f0 = fold_zone(-std::arg(eig[0].value) / T, w);
    const double f1 = fold_zone(-std::arg(eig[1].value) / T, w);

    // Folded fields: nu1 the larger folded value.
    const int hi = f0 >= f1 ? 0 : 1;
    const int lo = 1 - hi;
    out.q.nu1 = hi == 0 ? f0 : f1;
    out.q.nu2 = lo == 0 ? f0 : f1;

    // Physical pairing: splitting closest to the seed.
    double best = -1.0;
    for (int first : {0, 1}) {
        const double a = first == 0 ? f0 : f1;
        const double b = first == 0 ? f1 : f0;
        for (int k = -2; k <= 2; ++k) {
            const double s = a - b + k * w;
            if (s <= 0.0) continue;
            if (best < 0.0 || std::abs(s - seed) < std::abs(best - seed)) {
                best = s;
                out.q.unwrapped2 = b;
                out.q.unwrapped1 = b + s;
                out.vec1 = eig[first].vector;
                out.vec2 = eig[1 - first].vector;
            }
        }
    }
    return out;
}

}  // namespace detail

// Quasi-energy pair at a single phi; the unwrapped representatives are seeded
// by the RWA splitting at the same phi.
inline QuasiEnergyPair quasi_energies(double phi, const ChainParams& p,
                                      int steps_per_period = 0) {
    const double dc = 2.0 * (p.t_a - p.t_b) * std::cos(phi);
    const double seed = std::sqrt(dc * dc + p.rabi * p.rabi);
    return detail::quasi_energies_tracked(phi, p, steps_per_period, seed).q;
}

// phi-averaged quasi-energy splitting over one full period, walked from
// phi = pi/2 with eigenvector-overlap branch continuity.
inline double mean_ro_frequency_floquet(const ChainParams& p, int n_phi = 64,
                                        int steps_per_period = 0) {
    if (n_phi < 64) throw std::invalid_argument("n_phi must be >= 64");
    const double w = p.drive_freq;
    const double dphi = 2.0 * M_PI / n_phi;

    auto start =
        detail::quasi_energies_tracked(0.5 * M_PI, p, steps_per_period, p.rabi);
    double u1 = start.q.unwrapped1;
    double u2 = start.q.unwrapped2;
    auto v1 = start.vec1;
    auto v2 = start.vec2;

    double sum = u1 - u2;
    for (int i = 1; i <= n_phi; ++i) {
        const double phi = 0.5 * M_PI + i * dphi;
        auto cur = detail::quasi_energies_tracked(phi, p, steps_per_period,
                                                  u1 - u2);
        // Match branches to the previous eigenvectors.
        double a = cur.q.unwrapped1, b = cur.q.unwrapped2;
        auto va = cur.vec1, vb = cur.vec2;
        if (detail::overlap(v1, va) + detail::overlap(v2, vb) <
            detail::overlap(v1, vb) + detail::overlap(v2, va)) {
            std::swap(a, b);
            std::swap(va, vb);
        }
        // Continue each branch by the nearest integer-w representative.
        u1 = a + w * std::round((u1 - a) / w);
        u2 = b + w * std::round((u2 - b) / w);
        v1 = va;
        v2 = vb;
        if (i < n_phi) sum += u1 - u2;
    }
    if (std::abs((u1 - u2) - (start.q.unwrapped1 - start.q.unwrapped2)) >
        1e-6 * w)
        throw NumericalError(
            "quasi-energy branches failed to close over one phi period");
    return sum / n_phi;
}

// One member of the predicted line comb.
struct PredictedLine {
    double freq = 0.0;
    int m = 0;
    int n = 0;
    int p = 0;  // -1, 0, +1
};

namespace detail {
// Lexicographic label preference: fewest total indices, then |p|, |n|, |m|.
inline std::array<int, 4> label_cost(int m, int n, int p) {
    return {std::abs(m) + std::abs(n) + std::abs(p), std::abs(p), std::abs(n),
            std::abs(m)};
}
}  // namespace detail

// All nonnegative comb frequencies m*omega0 + n*Omega_B + p*omega_bar with
// |m| <= m_max, |n| <= n_max, p in {-1,0,1}; coincident frequencies (within
// 1e-9) are merged keeping the lowest-cost label; sorted ascending.
inline std::vector<PredictedLine> predicted_lines(const ChainParams& params,
                                                  double omega_bar, int m_max,
                                                  int n_max) {
    if (m_max < 0 || n_max < 0)
        throw std::invalid_argument("m_max and n_max must be >= 0");
    std::vector<PredictedLine> all;
    for (int m = -m_max; m <= m_max; ++m)
        for (int n = -n_max; n <= n_max; ++n)
            for (int p = -1; p <= 1; ++p) {
                const double f =
                    m * params.omega0 + n * params.bloch + p * omega_bar;
                if (f < -1e-12) continue;
                all.push_back({std::max(f, 0.0), m, n, p});
            }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
        if (x.freq != y.freq) return x.freq < y.freq;
        return detail::label_cost(x.m, x.n, x.p) <
               detail::label_cost(y.m, y.n, y.p);
    });
    std::vector<PredictedLine> out;
    for (const auto& line : all) {
        if (!out.empty() && std::abs(line.freq - out.back().freq) <= 1e-9)
            continue;  // keep the first (lowest-cost) representative
        out.push_back(line);
    }
    return out;
}

}  // namespace rabibloch
