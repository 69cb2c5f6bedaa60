// core.hpp — Parameter and state model for the driven two-level chain.
//
// Conventions used throughout the library: hbar = 1, e = 1, and the quantum
// transition frequency omega0 sets the frequency unit, so time is measured in
// 1/omega0 and current in e*omega0. The lattice constant is metadata only.
// Sites are labelled j = 0..N-1 externally; the dc tilt acts on the centered
// index p = j - floor(N/2), so a uniform shift of the p-origin is a pure
// global phase.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabibloch {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

enum class Boundary { open, periodic };

// full  — Eqs. of motion with the cos(wt) drive, counter-rotating terms kept
// rwa   — co-rotating coupling only, -(Omega_R/2) e^{-+iwt}
// stark — static coupling -Omega_R, dc-only drive (drive_freq ignored)
enum class DriveMode { full, rwa, stark };

inline const char* to_string(Boundary b) {
    return b == Boundary::open ? "open" : "periodic";
}
inline const char* to_string(DriveMode m) {
    switch (m) {
        case DriveMode::full: return "full";
        case DriveMode::rwa: return "rwa";
        default: return "stark";
    }
}

// Physical constants of one chain scenario.
struct ChainParams {
    int n_sites = 1;
    double lattice_const_nm = 20.0;  // metadata only
    double omega0 = 1.0;             // transition frequency (frequency unit)
    double drive_freq = 1.0;         // ac drive frequency w (w = omega0 at resonance)
    double rabi = 0.0;               // Omega_R
    double bloch = 0.0;              // Omega_B
    double t_a = 0.0;                // excited-band tunneling factor
    double t_b = 0.0;                // ground-band tunneling factor
    double gamma = 0.0;              // per-level decay rate (0 = lossless)
    Boundary boundary = Boundary::open;
    DriveMode mode = DriveMode::full;

    // Centered tilt index: p = j - floor(N/2).
    int tilt_origin() const { return n_sites / 2; }
};

// Q = omega0 / (2 gamma)
inline double gamma_from_q(double omega0, double q_factor) {
    if (q_factor <= 0.0) throw std::invalid_argument("q_factor must be > 0");
    return omega0 / (2.0 * q_factor);
}

// Gaussian wave packet on one band, amp ~ exp[-(j-j')^2/sigma^2] e^{i j phi0},
// renormalized to unit total norm.
struct GaussianPacket {
    double center_site = 0.0;   // j'
    double width_sites = 1.0;   // sigma in sites (e^-1 half-width)
    bool excited = true;        // which band carries the packet
    double phase_per_site = 0.0;  // phi0
};

// Complex site amplitudes of both bands at one instant.
struct AmplitudeState {
    double time = 0.0;
    CVector amp_excited;  // a_p
    CVector amp_ground;   // b_p

    std::size_t size() const { return amp_excited.size(); }
};

inline double state_norm(const AmplitudeState& s) {
    double n = 0.0;
    for (const auto& z : s.amp_excited) n += std::norm(z);
    for (const auto& z : s.amp_ground) n += std::norm(z);
    return n;
}

// Collects every violated invariant; an empty result means the params are
// usable by all downstream constructors.
inline std::vector<std::string> validate(const ChainParams& p) {
    std::vector<std::string> errors;
    if (p.n_sites < 1) errors.push_back("n_sites must be >= 1");
    if (!(p.lattice_const_nm > 0.0)) errors.push_back("lattice_const_nm must be > 0");
    if (!(p.omega0 > 0.0)) errors.push_back("omega0 must be > 0");
    if (p.drive_freq < 0.0) errors.push_back("drive_freq must be >= 0");
    if (p.rabi < 0.0) errors.push_back("rabi must be >= 0");
    if (p.bloch < 0.0) errors.push_back("bloch must be >= 0");
    if (p.gamma < 0.0) errors.push_back("gamma must be >= 0");
    if (!std::isfinite(p.t_a)) errors.push_back("t_a must be finite");
    if (!std::isfinite(p.t_b)) errors.push_back("t_b must be finite");
    return errors;
}

inline void require_valid(const ChainParams& p) {
    auto errors = validate(p);
    if (errors.empty()) return;
    std::string msg = "invalid ChainParams:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw std::invalid_argument(msg);
}

// Normalized initial state with the packet on one band, the other band zero.
// Deterministic: identical inputs give bit-identical states. A width of 0 is
// treated as the single-site limit.
inline AmplitudeState make_initial_state(const ChainParams& params,
                                         const GaussianPacket& packet) {
    require_valid(params);
    if (packet.width_sites < 0.0)
        throw std::invalid_argument("width_sites must be >= 0");

    const int n = params.n_sites;
    AmplitudeState state;
    state.time = 0.0;
    state.amp_excited.assign(n, Complex(0.0, 0.0));
    state.amp_ground.assign(n, Complex(0.0, 0.0));

    CVector& band = packet.excited ? state.amp_excited : state.amp_ground;
    if (packet.width_sites == 0.0) {
        int j0 = static_cast<int>(std::lround(packet.center_site));
        if (j0 < 0 || j0 >= n)
            throw std::invalid_argument("delta packet center outside the chain");
        band[j0] = Complex(1.0, 0.0);
        return state;
    }

    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) {
        const double x = (j - packet.center_site) / packet.width_sites;
        const double mag = std::exp(-x * x);
        band[j] = std::polar(mag, packet.phase_per_site * j);
        norm2 += mag * mag;
    }
    if (norm2 <= 0.0)
        throw std::invalid_argument("packet has zero weight on the chain");
    const double inv = 1.0 / std::sqrt(norm2);
    for (int j = 0; j < n; ++j) band[j] *= inv;
    return state;
}

}  // namespace rabibloch
