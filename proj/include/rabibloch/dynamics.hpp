// dynamics.hpp — Time-domain integration of the chain amplitude equations.
//
// The equations of motion (units of omega0):
//   i da_p/dt = (omega0/2 - p*Omega_B) a_p + t_a (a_{p+1} + a_{p-1}) + c_a(t) b_p
//   i db_p/dt = -(omega0/2 + p*Omega_B) b_p + t_b (b_{p+1} + b_{p-1}) + c_b(t) a_p
// with the coupling c(t) selected by the drive mode:
//   full:  c_a = c_b = -Omega_R cos(wt)
//   rwa:   c_a = -(Omega_R/2) e^{-iwt},  c_b = -(Omega_R/2) e^{+iwt}
//   stark: c_a = c_b = -Omega_R
// Equal-rate decay gamma adds -(gamma/2) * amplitude to both rows. Because
// that term is a commuting scalar, the propagator factorizes exactly as
// e^{-gamma t/2} times the lossless flow; evolve() integrates the decay by
// that exact factor per step so the factorization survives discretization to
// rounding accuracy (a plain RK4 on the modified RHS does not).

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rabibloch/core.hpp"

namespace rabibloch {

// NaN, overflow, or a broken conservation law during integration.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

enum class Scheme { rk4 };

struct IntegrationSettings {
    double dt = 0.01;
    double t_end = 1.0;
    int record_every = 1;
    Scheme scheme = Scheme::rk4;
};

// Stability/accuracy scale of the RHS: the largest diagonal magnitude plus
// tunneling and drive contributions.
inline double lambda_max(const ChainParams& p) {
    return 0.5 * p.omega0 + 0.5 * p.n_sites * p.bloch +
           2.0 * std::max(std::abs(p.t_a), std::abs(p.t_b)) + p.rabi;
}

// Default step budget dt * lambda_max <= 0.1, capped at 0.01; snapshot stride
// targets a sampling interval of 0.1.
inline IntegrationSettings default_settings(const ChainParams& p, double t_end) {
    IntegrationSettings s;
    s.dt = std::min(0.1 / lambda_max(p), 0.01);
    s.t_end = t_end;
    s.record_every = std::max(1, static_cast<int>(std::floor(0.1 / s.dt + 1e-9)));
    return s;
}

inline std::vector<std::string> validate(const IntegrationSettings& s,
                                         const ChainParams& p) {
    std::vector<std::string> errors;
    if (!(s.dt > 0.0)) errors.push_back("dt must be > 0");
    if (!(s.t_end > 0.0)) errors.push_back("t_end must be > 0");
    if (s.record_every < 1) errors.push_back("record_every must be >= 1");
    if (s.dt * lambda_max(p) > 0.1 + 1e-12)
        errors.push_back("dt exceeds the step budget dt*lambda_max <= 0.1");
    return errors;
}

struct Trajectory {
    ChainParams params;
    IntegrationSettings settings;
    std::vector<AmplitudeState> snapshots;
};

namespace detail {

// Mode-dependent coupling factors multiplying the opposite band's amplitude.
inline std::pair<Complex, Complex> coupling(const ChainParams& p, double t) {
    switch (p.mode) {
        case DriveMode::full: {
            const double c = -p.rabi * std::cos(p.drive_freq * t);
            return {Complex(c, 0.0), Complex(c, 0.0)};
        }
        case DriveMode::rwa: {
            const double ph = p.drive_freq * t;
            const Complex ca = -0.5 * p.rabi * Complex(std::cos(ph), -std::sin(ph));
            return {ca, std::conj(ca)};
        }
        default:
            return {Complex(-p.rabi, 0.0), Complex(-p.rabi, 0.0)};
    }
}

// Lossless RHS written into preallocated buffers. tilt_origin is the site
// index where p = 0.
inline void rhs_lossless(const Complex* a, const Complex* b, double t,
                         const ChainParams& p, int tilt_origin, Complex* da,
                         Complex* db) {
    const int n = p.n_sites;
    const auto [ca, cb] = coupling(p, t);
    const Complex mi(0.0, -1.0);
    const bool wrap = p.boundary == Boundary::periodic;

    auto row = [&](int j, Complex am, Complex ap, Complex bm, Complex bp) {
        const double tilt = (j - tilt_origin) * p.bloch;
        const double ea = 0.5 * p.omega0 - tilt;
        const double eb = -0.5 * p.omega0 - tilt;
        da[j] = mi * (ea * a[j] + p.t_a * (ap + am) + ca * b[j]);
        db[j] = mi * (eb * b[j] + p.t_b * (bp + bm) + cb * a[j]);
    };

    for (int j = 1; j + 1 < n; ++j) row(j, a[j - 1], a[j + 1], b[j - 1], b[j + 1]);

    const Complex zero(0.0, 0.0);
    if (n == 1) {
        row(0, wrap ? a[0] : zero, wrap ? a[0] : zero, wrap ? b[0] : zero,
            wrap ? b[0] : zero);
        return;
    }
    row(0, wrap ? a[n - 1] : zero, a[1], wrap ? b[n - 1] : zero, b[1]);
    row(n - 1, a[n - 2], wrap ? a[0] : zero, b[n - 2], wrap ? b[0] : zero);
}

struct Rk4Workspace {
    CVector k1a, k2a, k3a, k4a, k1b, k2b, k3b, k4b, ta, tb;
    explicit Rk4Workspace(std::size_t n)
        : k1a(n), k2a(n), k3a(n), k4a(n), k1b(n), k2b(n), k3b(n), k4b(n), ta(n),
          tb(n) {}
};

// One lossless RK4 update of (a, b) in place; the caller applies the decay
// factor afterwards.
inline void rk4_update(CVector& a, CVector& b, double t, double dt,
                       const ChainParams& p, int tilt_origin, Rk4Workspace& w) {
    const std::size_t n = a.size();
    rhs_lossless(a.data(), b.data(), t, p, tilt_origin, w.k1a.data(), w.k1b.data());
    for (std::size_t j = 0; j < n; ++j) {
        w.ta[j] = a[j] + 0.5 * dt * w.k1a[j];
        w.tb[j] = b[j] + 0.5 * dt * w.k1b[j];
    }
    rhs_lossless(w.ta.data(), w.tb.data(), t + 0.5 * dt, p, tilt_origin,
                 w.k2a.data(), w.k2b.data());
    for (std::size_t j = 0; j < n; ++j) {
        w.ta[j] = a[j] + 0.5 * dt * w.k2a[j];
        w.tb[j] = b[j] + 0.5 * dt * w.k2b[j];
    }
    rhs_lossless(w.ta.data(), w.tb.data(), t + 0.5 * dt, p, tilt_origin,
                 w.k3a.data(), w.k3b.data());
    for (std::size_t j = 0; j < n; ++j) {
        w.ta[j] = a[j] + dt * w.k3a[j];
        w.tb[j] = b[j] + dt * w.k3b[j];
    }
    rhs_lossless(w.ta.data(), w.tb.data(), t + dt, p, tilt_origin, w.k4a.data(),
                 w.k4b.data());
    const double s = dt / 6.0;
    for (std::size_t j = 0; j < n; ++j) {
        a[j] += s * (w.k1a[j] + 2.0 * w.k2a[j] + 2.0 * w.k3a[j] + w.k4a[j]);
        b[j] += s * (w.k1b[j] + 2.0 * w.k2b[j] + 2.0 * w.k3b[j] + w.k4b[j]);
    }
}

}  // namespace detail

// Full right-hand side (including the decay rows) at time t. Pass tilt_origin
// < 0 to use the centered default; the offset changes amplitudes only by a
// global phase.
inline std::pair<CVector, CVector> derivative(const AmplitudeState& state,
                                              const ChainParams& params,
                                              double t, int tilt_origin = -1) {
    require_valid(params);
    if (state.amp_excited.size() != static_cast<std::size_t>(params.n_sites) ||
        state.amp_ground.size() != static_cast<std::size_t>(params.n_sites))
        throw std::invalid_argument("state size does not match n_sites");
    for (std::size_t j = 0; j < state.size(); ++j) {
        if (!std::isfinite(state.amp_excited[j].real()) ||
            !std::isfinite(state.amp_excited[j].imag()) ||
            !std::isfinite(state.amp_ground[j].real()) ||
            !std::isfinite(state.amp_ground[j].imag()))
            throw NumericalError("non-finite amplitude in state at site " +
                                 std::to_string(j));
    }
    if (tilt_origin < 0) tilt_origin = params.tilt_origin();
    CVector da(params.n_sites), db(params.n_sites);
    detail::rhs_lossless(state.amp_excited.data(), state.amp_ground.data(), t,
                         params, tilt_origin, da.data(), db.data());
    if (params.gamma > 0.0) {
        for (int j = 0; j < params.n_sites; ++j) {
            da[j] -= 0.5 * params.gamma * state.amp_excited[j];
            db[j] -= 0.5 * params.gamma * state.amp_ground[j];
        }
    }
    return {std::move(da), std::move(db)};
}

// Advance one step of settings.dt starting from time t.
inline AmplitudeState step(const AmplitudeState& state, const ChainParams& params,
                           const IntegrationSettings& settings, double t) {
    require_valid(params);
    AmplitudeState out = state;
    detail::Rk4Workspace w(state.size());
    detail::rk4_update(out.amp_excited, out.amp_ground, t, settings.dt, params,
                       params.tilt_origin(), w);
    if (params.gamma > 0.0) {
        const double f = std::exp(-0.5 * params.gamma * settings.dt);
        for (auto& z : out.amp_excited) z *= f;
        for (auto& z : out.amp_ground) z *= f;
    }
    out.time = t + settings.dt;
    return out;
}

// Integrate from the initial state to t_end, recording every record_every
// steps. Throws NumericalError on NaN or when the lossless-equivalent norm
// drifts by more than 1e-6 relative.
inline Trajectory evolve(const AmplitudeState& initial, const ChainParams& params,
                         const IntegrationSettings& settings,
                         int tilt_origin = -1) {
    require_valid(params);
    {
        auto errors = validate(settings, params);
        if (!errors.empty()) {
            std::string msg = "invalid IntegrationSettings:";
            for (const auto& e : errors) msg += " " + e + ";";
            throw std::invalid_argument(msg);
        }
    }
    if (initial.amp_excited.size() != static_cast<std::size_t>(params.n_sites) ||
        initial.amp_ground.size() != static_cast<std::size_t>(params.n_sites))
        throw std::invalid_argument("initial state size does not match n_sites");
    if (tilt_origin < 0) tilt_origin = params.tilt_origin();

    const double dt = settings.dt;
    const int rec = settings.record_every;
    const long nsteps =
        static_cast<long>(std::floor(settings.t_end / (dt * rec) + 1e-9)) * rec;

    Trajectory traj;
    traj.params = params;
    traj.settings = settings;
    traj.snapshots.reserve(static_cast<std::size_t>(nsteps / rec) + 1);
    traj.snapshots.push_back(initial);
    traj.snapshots.front().time = 0.0;

    CVector a = initial.amp_excited;
    CVector b = initial.amp_ground;
    detail::Rk4Workspace w(a.size());
    const double norm0 = state_norm(initial);
    const double decay = params.gamma > 0.0
                             ? std::exp(-0.5 * params.gamma * dt)
                             : 1.0;

    for (long k = 0; k < nsteps; ++k) {
        const double t = static_cast<double>(k) * dt;
        detail::rk4_update(a, b, t, dt, params, tilt_origin, w);
        if (params.gamma > 0.0) {
            for (auto& z : a) z *= decay;
            for (auto& z : b) z *= decay;
        }
        if ((k + 1) % rec == 0) {
            AmplitudeState snap;
            snap.time = static_cast<double>(k + 1) * dt;
            snap.amp_excited = a;
            snap.amp_ground = b;
            const double nrm = state_norm(snap);
            if (!std::isfinite(nrm))
                throw NumericalError("non-finite state at step " +
                                     std::to_string(k + 1));
            const double expected = norm0 * std::exp(-params.gamma * snap.time);
            if (norm0 > 0.0 && std::abs(nrm / expected - 1.0) > 1e-6)
                throw NumericalError(
                    "norm drift " + std::to_string(nrm / expected - 1.0) +
                    " exceeds 1e-6 at step " + std::to_string(k + 1));
            traj.snapshots.push_back(std::move(snap));
        }
    }
    return traj;
}

}  // namespace rabibloch
