// analytics.hpp — Closed-form RWA theory of the driven chain: eigenmode
// dispersion, travelling Rabi waves, the excited-start tunneling current, the
// phi-averaged RO frequency, and the quasi-classical Rabi-Bloch and dc-only
// (Stark) envelopes.
//
// All formulas assume exact resonance (drive_freq = omega0) for the wave
// solutions; the dispersion itself depends only on the tunneling factors and
// Omega_R.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rabibloch/core.hpp"

namespace rabibloch {

// Lambda is 0/0 when Omega_R = 0 and (t_a - t_b) cos(phi) <= 0.
class DegenerateModeError : public std::domain_error {
  public:
    explicit DegenerateModeError(const std::string& what)
        : std::domain_error(what) {}
};

// Per-quasimomentum mode data of the two-band RWA problem.
//   nu1,2    eigen-frequencies, nu1 the + root
//   lambda   amplitude mixing factor
//   big_omega corrected Rabi frequency sqrt(4 (t_a-t_b)^2 cos^2 + Omega_R^2)
//   mu       common drift (t_a + t_b) cos(phi)
struct ModeInfo {
    double phase_per_cell = 0.0;
    double nu1 = 0.0;
    double nu2 = 0.0;
    double lambda = 0.0;
    double big_omega = 0.0;
    double mu = 0.0;
};

inline ModeInfo mode_info(double phi, const ChainParams& p) {
    const double c = std::cos(phi);
    const double delta = (p.t_a - p.t_b) * c;
    const double disc = std::sqrt(delta * delta + 0.25 * p.rabi * p.rabi);
    const double denom = 2.0 * (delta + disc);
    if (denom == 0.0)
        throw DegenerateModeError(
            "mixing factor undefined: Omega_R = 0 and (t_a - t_b) cos(phi) <= 0");
    ModeInfo m;
    m.phase_per_cell = phi;
    m.mu = (p.t_a + p.t_b) * c;
    m.nu1 = m.mu + disc;
    m.nu2 = m.mu - disc;
    m.lambda = p.rabi / denom;
    m.big_omega = 2.0 * disc;
    return m;
}

// Coefficients (C1, C2) selecting the completely excited initial state
// B_p(0) = 0; they satisfy |C1|^2 + |C2|^2 = (1 + Lambda^2)^-1.
inline std::pair<Complex, Complex> excited_start_coefficients(double phi,
                                                              const ChainParams& p) {
    const double L = mode_info(phi, p).lambda;
    const double d = 1.0 + L * L;
    return {Complex(1.0 / d, 0.0), Complex(L / d, 0.0)};
}

// Site-independent factors F_A(t), F_B(t) of the travelling wave
// A_p = F_A e^{i p phi}, B_p = F_B e^{i p phi}.
inline std::pair<Complex, Complex> travelling_wave_factors(double phi, double t,
                                                           Complex c1, Complex c2,
                                                           const ChainParams& p) {
    const ModeInfo m = mode_info(phi, p);
    const double budget = 1.0 / (1.0 + m.lambda * m.lambda);
    if (std::abs(std::norm(c1) + std::norm(c2) - budget) > 1e-10)
        throw std::invalid_argument(
            "coefficients violate |C1|^2 + |C2|^2 = (1 + Lambda^2)^-1");
    const Complex em = std::polar(1.0, -0.5 * m.big_omega * t);  // e^{-i Omega t/2}
    const Complex ep = std::conj(em);
    const Complex ew = std::polar(1.0, -0.5 * p.drive_freq * t);  // e^{-i w t/2}
    const Complex fa = (c1 * em + m.lambda * c2 * ep) * ew;
    const Complex fb = (c2 * ep - m.lambda * c1 * em) * std::conj(ew);
    return {fa, fb};
}

// Full normalized chain state of the travelling wave on a ring of
// params.n_sites sites: amplitude = factor * e^{i p phi} * e^{-i mu t} / sqrt(N)
// with p centered on the tilt origin.
inline AmplitudeState travelling_wave_state(double phi, double t, Complex c1,
                                            Complex c2, const ChainParams& p) {
    const ModeInfo m = mode_info(phi, p);
    const auto [fa, fb] = travelling_wave_factors(phi, t, c1, c2, p);
    const int n = p.n_sites;
    const int origin = p.tilt_origin();
    const Complex drift = std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                                     -m.mu * t);
    AmplitudeState s;
    s.time = t;
    s.amp_excited.resize(n);
    s.amp_ground.resize(n);
    for (int j = 0; j < n; ++j) {
        const Complex bloch = std::polar(1.0, (j - origin) * phi);
        s.amp_excited[j] = fa * bloch * drift;
        s.amp_ground[j] = fb * bloch * drift;
    }
    return s;
}

// Eigenmode state (branch 1 or 2) at time t, normalized on the ring.
inline AmplitudeState eigenmode_state(double phi, double t, int branch,
                                      const ChainParams& p) {
    if (branch != 1 && branch != 2)
        throw std::invalid_argument("branch must be 1 or 2");
    const ModeInfo m = mode_info(phi, p);
    const int n = p.n_sites;
    const int origin = p.tilt_origin();
    const double nu = branch == 1 ? m.nu1 : m.nu2;
    const double pref = 1.0 / std::sqrt(n * (1.0 + m.lambda * m.lambda));
    const Complex ew = std::polar(1.0, -0.5 * p.drive_freq * t);
    AmplitudeState s;
    s.time = t;
    s.amp_excited.resize(n);
    s.amp_ground.resize(n);
    for (int j = 0; j < n; ++j) {
        const Complex ph = std::polar(pref, (j - origin) * phi - nu * t);
        if (branch == 1) {
            s.amp_excited[j] = ph * ew;
            s.amp_ground[j] = -m.lambda * ph * std::conj(ew);
        } else {
            s.amp_excited[j] = m.lambda * ph * ew;
            s.amp_ground[j] = ph * std::conj(ew);
        }
    }
    return s;
}

// Per-site tunneling current of the completely excited travelling wave
// (amplitudes of order one, e = 1):
//   J = -2 sin(phi)/(1+L^2)^2 [ t_a (1 + L^4 + 2 L^2 cos Omega t)
//                               + 4 t_b L^2 sin^2(Omega t / 2) ]
inline double closed_form_current(double phi, double t, const ChainParams& p) {
    const ModeInfo m = mode_info(phi, p);
    const double L2 = m.lambda * m.lambda;
    const double s = std::sin(0.5 * m.big_omega * t);
    const double bracket = p.t_a * (1.0 + L2 * L2 +
                                    2.0 * L2 * std::cos(m.big_omega * t)) +
                           4.0 * p.t_b * L2 * s * s;
    const double d = 1.0 + L2;
    return -2.0 * std::sin(phi) * bracket / (d * d);
}

// phi-averaged RO frequency (composite trapezoid on the periodic integrand;
// spectrally accurate for Omega_R > 0).
inline double mean_ro_frequency_rwa(const ChainParams& p, int n_points = 1 << 16) {
    if (n_points < 2) throw std::invalid_argument("n_points must be >= 2");
    const double delta = p.t_a - p.t_b;
    double sum = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const double phi = (2.0 * M_PI * i) / n_points;
        const double dc = 2.0 * delta * std::cos(phi);
        sum += std::sqrt(dc * dc + p.rabi * p.rabi);
    }
    return sum / n_points;
}

// Instantaneous RO frequency and mixing factor.
struct RoEnvelope {
    double omega = 0.0;
    double lambda = 0.0;
};

// Quasi-classical substitution phi -> -Omega_B t + phi0 in the mode formulas.
inline RoEnvelope quasiclassical_ro(double t, double phi0, const ChainParams& p) {
    const ModeInfo m = mode_info(phi0 - p.bloch * t, p);
    return {m.big_omega, m.lambda};
}

// Dc-only (Stark) envelope exactly as printed in the source model, which
// differs from quasiclassical_ro by a factor 4 under the square root and a
// factor 2 in the mixing denominator; quasiclassical_forms() exposes both so
// the discrepancy stays visible.
inline RoEnvelope stark_quasiclassical(double t, double phi0,
                                       const ChainParams& p) {
    const double c = std::cos(p.bloch * t - phi0);
    const double dc = (p.t_a - p.t_b) * c;
    const double omega = std::sqrt(dc * dc + p.rabi * p.rabi);
    const double denom = dc + omega;
    if (denom == 0.0)
        throw DegenerateModeError(
            "mixing factor undefined: Omega_R = 0 and (t_a - t_b) cos <= 0");
    return {omega, p.rabi / denom};
}

struct QuasiClassicalForms {
    RoEnvelope rabi_bloch;     // substitution into the dispersion formulas
    RoEnvelope stark_printed;  // the dc-only variant as printed
};

inline QuasiClassicalForms quasiclassical_forms(double t, double phi0,
                                                const ChainParams& p) {
    return {quasiclassical_ro(t, phi0, p), stark_quasiclassical(t, phi0, p)};
}

// Detuning delta of the near-resonance condition mean_RO = (m + delta) Omega_B.
inline double super_bloch_detuning(const ChainParams& p, int m) {
    if (!(p.bloch > 0.0)) throw std::invalid_argument("bloch must be > 0");
    return (mean_ro_frequency_rwa(p) - m * p.bloch) / p.bloch;
}

// Quasi-classical particle position x(t) = integral of the closed-form
// current with phi -> phi0 - Omega_B tau and the RO phase accumulated as
// theta(tau) = integral of Omega(tau'); sampled on a uniform grid (Heun).
inline std::pair<std::vector<double>, std::vector<double>>
super_bloch_trace(double t_end, double phi0, const ChainParams& p,
                  double dt = 2e-3) {
    if (!(p.bloch > 0.0)) throw std::invalid_argument("bloch must be > 0");
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw std::invalid_argument("dt and t_end must be > 0");
    const double delta = p.t_a - p.t_b;
    auto eval = [&](double t, double theta) -> std::pair<double, double> {
        const double c = std::cos(phi0 - p.bloch * t);
        const double dc = 2.0 * delta * c;
        const double omega = std::sqrt(dc * dc + p.rabi * p.rabi);
        if (p.rabi == 0.0) {
            // excited start without interband mixing: bare band current
            return {-2.0 * p.t_a * std::sin(phi0 - p.bloch * t), omega};
        }
        const double L = p.rabi / (dc + omega);
        const double L2 = L * L;
        const double sh = std::sin(0.5 * theta);
        const double d = 1.0 + L2;
        const double j = -2.0 * std::sin(phi0 - p.bloch * t) *
                         (p.t_a * (1.0 + L2 * L2 + 2.0 * L2 * std::cos(theta)) +
                          4.0 * p.t_b * L2 * sh * sh) /
                         (d * d);
        return {j, omega};
    };
    const long n = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    std::vector<double> ts(n + 1), xs(n + 1);
    double x = 0.0, theta = 0.0;
    ts[0] = 0.0;
    xs[0] = 0.0;
    for (long k = 0; k < n; ++k) {
        const double t = k * dt;
        const auto [j1, om1] = eval(t, theta);
        const auto [j2, om2] = eval(t + dt, theta + dt * om1);
        x += 0.5 * dt * (j1 + j2);
        theta += 0.5 * dt * (om1 + om2);
        ts[k + 1] = (k + 1) * dt;
        xs[k + 1] = x;
    }
    return {std::move(ts), std::move(xs)};
}

inline double super_bloch_position(double t, double phi0, const ChainParams& p,
                                   double dt = 2e-3) {
    return super_bloch_trace(t, phi0, p, dt).second.back();
}

}  // namespace rabibloch
