// spectra.hpp — One-sided magnitude spectra of observable series, peak
// detection with parabolic refinement, and labeling against the line comb.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rabibloch/floquet.hpp"
#include "rabibloch/observables.hpp"

namespace rabibloch {

enum class Window { rect, hann };

inline const char* to_string(Window w) {
    return w == Window::rect ? "rect" : "hann";
}

namespace detail {

// In-place iterative radix-2 FFT; size must be a power of two.
inline void fft_pow2(CVector& x) {
    const std::size_t n = x.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const Complex wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex u = x[i + k];
                const Complex v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace detail

// One-sided magnitude spectrum. omegas run from 0 to pi/dt_sample in steps of
// 2 pi / (n_fft * dt_sample); magnitudes are amplitude-normalized (a unit
// sinusoid at a bin center gives magnitude ~1).
struct Spectrum {
    std::vector<double> omegas;
    std::vector<double> magnitudes;
    Window window = Window::hann;
    double dt_sample = 0.0;
    int n_samples = 0;
    int n_fft = 0;
};

// Mean-subtracted, windowed, zero-padded spectrum of a uniformly sampled
// series. n_fft is the next power of two >= n_samples * zero_pad_factor.
inline Spectrum power_spectrum(const ObservableSeries& series,
                               Window window = Window::hann,
                               int zero_pad_factor = 1) {
    const std::size_t n = series.values.size();
    if (n < 16) throw std::invalid_argument("need at least 16 samples");
    if (series.times.size() != n)
        throw std::invalid_argument("times/values length mismatch");
    if (zero_pad_factor < 1)
        throw std::invalid_argument("zero_pad_factor must be >= 1");
    const double dt = (series.times.back() - series.times.front()) /
                      static_cast<double>(n - 1);
    if (!(dt > 0.0)) throw std::invalid_argument("times must be increasing");
    for (std::size_t i = 1; i < n; ++i) {
        const double step = series.times[i] - series.times[i - 1];
        if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw std::invalid_argument("non-uniform sampling");
    }

    double mean = 0.0;
    for (double v : series.values) mean += v;
    mean /= static_cast<double>(n);

    const std::size_t nfft =
        detail::next_pow2(n * static_cast<std::size_t>(zero_pad_factor));
    CVector buf(nfft, Complex(0.0, 0.0));
    double wsum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double w = 1.0;
        if (window == Window::hann && n > 1)
            w = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(k) /
                                      static_cast<double>(n - 1)));
        wsum += w;
        buf[k] = Complex((series.values[k] - mean) * w, 0.0);
    }
    detail::fft_pow2(buf);

    Spectrum s;
    s.window = window;
    s.dt_sample = dt;
    s.n_samples = static_cast<int>(n);
    s.n_fft = static_cast<int>(nfft);
    const std::size_t half = nfft / 2;
    s.omegas.resize(half + 1);
    s.magnitudes.resize(half + 1);
    const double dom = 2.0 * M_PI / (static_cast<double>(nfft) * dt);
    const double scale = wsum > 0.0 ? 2.0 / wsum : 0.0;
    for (std::size_t k = 0; k <= half; ++k) {
        s.omegas[k] = dom * static_cast<double>(k);
        s.magnitudes[k] = scale * std::abs(buf[k]);
    }
    return s;
}

inline double bin_width(const Spectrum& s) {
    return 2.0 * M_PI / (s.n_fft * s.dt_sample);
}

struct LineLabel {
    int m = 0;
    int n = 0;
    int p = 0;
};

struct SpectralLine {
    double omega_peak = 0.0;
    double magnitude = 0.0;
    std::optional<LineLabel> label;
    double residual = 0.0;  // |omega_peak - labeled comb frequency|
};

// Local maxima above rel_threshold * max(magnitude), separated by at least
// min_separation_bins, refined by 3-point parabolic interpolation of the
// log-magnitude; sorted by descending magnitude.
inline std::vector<SpectralLine> find_peaks(const Spectrum& s,
                                            double rel_threshold = 0.01,
                                            int min_separation_bins = 4) {
    if (s.magnitudes.empty()) throw std::invalid_argument("empty spectrum");
    if (!(rel_threshold > 0.0 && rel_threshold < 1.0))
        throw std::invalid_argument("rel_threshold must be in (0,1)");
    if (min_separation_bins < 1)
        throw std::invalid_argument("min_separation_bins must be >= 1");

    const std::size_t n = s.magnitudes.size();
    double maxmag = 0.0;
    for (double m : s.magnitudes) maxmag = std::max(maxmag, m);
    if (maxmag <= 0.0) return {};
    const double thr = rel_threshold * maxmag;

    std::vector<std::size_t> cand;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (s.magnitudes[k] >= thr && s.magnitudes[k] >= s.magnitudes[k - 1] &&
            s.magnitudes[k] > s.magnitudes[k + 1])
            cand.push_back(k);
    }
    std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
        if (s.magnitudes[a] != s.magnitudes[b])
            return s.magnitudes[a] > s.magnitudes[b];
        return a < b;
    });

    std::vector<std::size_t> kept;
    for (std::size_t k : cand) {
        bool ok = true;
        for (std::size_t j : kept) {
            if (std::llabs(static_cast<long long>(k) - static_cast<long long>(j)) <
                min_separation_bins) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(k);
    }

    const double dom = bin_width(s);
    std::vector<SpectralLine> out;
    out.reserve(kept.size());
    for (std::size_t k : kept) {
        SpectralLine line;
        line.omega_peak = s.omegas[k];
        line.magnitude = s.magnitudes[k];
        const double l = s.magnitudes[k - 1], c = s.magnitudes[k],
                     r = s.magnitudes[k + 1];
        if (l > 0.0 && r > 0.0 && c > 0.0) {
            const double ll = std::log(l), lc = std::log(c), lr = std::log(r);
            const double den = ll - 2.0 * lc + lr;
            if (den < 0.0) {
                const double d = 0.5 * (ll - lr) / den;
                if (std::abs(d) <= 0.5) {
                    line.omega_peak = s.omegas[k] + d * dom;
                    line.magnitude = std::exp(lc - 0.25 * (ll - lr) * d);
                }
            }
        }
        out.push_back(line);
    }
    return out;
}

// Assign each peak the comb member m*omega0 + n*Omega_B + p*omega_bar
// (|m| <= m_max, |n| <= n_max, p in {-1,0,1}, frequency >= 0) minimizing the
// residual; ties within 1e-9 break on (|m|+|n|+|p|, |p|, |n|, |m|). Peaks whose
// best residual exceeds tol stay unlabeled. omega_bar <= 0 restricts p to 0.
inline std::vector<SpectralLine> label_peaks(std::vector<SpectralLine> peaks,
                                             double omega0, double bloch,
                                             double omega_bar, int m_max,
                                             int n_max, double tol) {
    if (m_max < 0 || n_max < 0)
        throw std::invalid_argument("m_max and n_max must be >= 0");
    const int p_max = omega_bar > 0.0 ? 1 : 0;
    for (auto& peak : peaks) {
        double best_res = -1.0;
        std::array<int, 4> best_cost{};
        LineLabel best{};
        for (int m = -m_max; m <= m_max; ++m)
            for (int n = -n_max; n <= n_max; ++n)
                for (int p = -p_max; p <= p_max; ++p) {
                    const double f = m * omega0 + n * bloch + p * omega_bar;
                    if (f < -1e-12) continue;
                    const double res = std::abs(peak.omega_peak - std::max(f, 0.0));
                    const auto cost = detail::label_cost(m, n, p);
                    bool take = false;
                    if (best_res < 0.0 || res < best_res - 1e-9)
                        take = true;
                    else if (res <= best_res + 1e-9 && cost < best_cost)
                        take = true;  // tie on residual: cheaper label wins
                    if (take) {
                        best_res = best_res < 0.0 ? res : std::min(res, best_res);
                        best_cost = cost;
                        best = {m, n, p};
                    }
                }
        if (best_res >= 0.0 && best_res <= tol) {
            peak.label = best;
            peak.residual = best_res;
        } else {
            peak.label.reset();
            peak.residual = best_res;
        }
    }
    return peaks;
}

}  // namespace rabibloch
