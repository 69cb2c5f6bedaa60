// observables.hpp — Per-site physical observables and time-series extraction.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabibloch/core.hpp"
#include "rabibloch/dynamics.hpp"

namespace rabibloch {

enum class ObservableKind { current, inversion, dipole, centroid, norm };

inline const char* to_string(ObservableKind k) {
    switch (k) {
        case ObservableKind::current: return "current";
        case ObservableKind::inversion: return "inversion";
        case ObservableKind::dipole: return "dipole";
        case ObservableKind::centroid: return "centroid";
        default: return "norm";
    }
}

// Per-site tunneling current density (e = 1):
//   J_p = i/2 [ t_a (a_{p+1} - a_{p-1}) a_p* + t_b (b_{p+1} - b_{p-1}) b_p* ] + c.c.
// Open ends use zero for the missing neighbor; periodic wraps.
inline std::vector<double> tunneling_current_density(const AmplitudeState& s,
                                                     const ChainParams& p) {
    const int n = static_cast<int>(s.size());
    const bool wrap = p.boundary == Boundary::periodic;
    std::vector<double> j(n);
    const Complex zero(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        const Complex ap = i + 1 < n ? s.amp_excited[i + 1]
                                     : (wrap ? s.amp_excited[0] : zero);
        const Complex am = i > 0 ? s.amp_excited[i - 1]
                                 : (wrap ? s.amp_excited[n - 1] : zero);
        const Complex bp = i + 1 < n ? s.amp_ground[i + 1]
                                     : (wrap ? s.amp_ground[0] : zero);
        const Complex bm = i > 0 ? s.amp_ground[i - 1]
                                 : (wrap ? s.amp_ground[n - 1] : zero);
        const Complex z = p.t_a * (ap - am) * std::conj(s.amp_excited[i]) +
                          p.t_b * (bp - bm) * std::conj(s.amp_ground[i]);
        j[i] = -z.imag();  // i/2 z + c.c. = -Im z
    }
    return j;
}

// w_p = |a_p|^2 - |b_p|^2
inline std::vector<double> inversion_density(const AmplitudeState& s) {
    std::vector<double> w(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        w[i] = std::norm(s.amp_excited[i]) - std::norm(s.amp_ground[i]);
    return w;
}

// d_p = 2 Re(a_p b_p*), in units of the transition dipole matrix element.
inline std::vector<double> dipole_density(const AmplitudeState& s) {
    std::vector<double> d(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        d[i] = 2.0 * (s.amp_excited[i] * std::conj(s.amp_ground[i])).real();
    return d;
}

// Probability centroid in site-index units.
inline double centroid(const AmplitudeState& s) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double rho = std::norm(s.amp_excited[i]) + std::norm(s.amp_ground[i]);
        num += static_cast<double>(i) * rho;
        den += rho;
    }
    if (den <= 0.0) throw std::invalid_argument("centroid of a zero-norm state");
    return num / den;
}

struct ObservableSeries {
    ObservableKind name = ObservableKind::norm;
    int site = -1;  // -1 for centroid/norm
    std::vector<double> times;
    std::vector<double> values;
};

// One observable sampled at the trajectory's snapshot times. Per-site
// observables require 0 <= site < n_sites.
inline ObservableSeries extract_series(const Trajectory& traj,
                                       ObservableKind name, int site = -1) {
    const bool per_site = name == ObservableKind::current ||
                          name == ObservableKind::inversion ||
                          name == ObservableKind::dipole;
    if (per_site && (site < 0 || site >= traj.params.n_sites))
        throw std::invalid_argument("site " + std::to_string(site) +
                                    " out of range for per-site observable");
    ObservableSeries out;
    out.name = name;
    out.site = per_site ? site : -1;
    out.times.reserve(traj.snapshots.size());
    out.values.reserve(traj.snapshots.size());
    for (const auto& snap : traj.snapshots) {
        out.times.push_back(snap.time);
        switch (name) {
            case ObservableKind::current:
                out.values.push_back(tunneling_current_density(snap, traj.params)[site]);
                break;
            case ObservableKind::inversion:
                out.values.push_back(inversion_density(snap)[site]);
                break;
            case ObservableKind::dipole:
                out.values.push_back(dipole_density(snap)[site]);
                break;
            case ObservableKind::centroid:
                out.values.push_back(centroid(snap));
                break;
            case ObservableKind::norm:
                out.values.push_back(state_norm(snap));
                break;
        }
    }
    return out;
}

}  // namespace rabibloch
