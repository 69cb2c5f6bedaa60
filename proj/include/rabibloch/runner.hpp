// runner.hpp — Scenario execution and file emission: time series, space-time
// grids, spectra and labeled lines in documented formats, plus parameter
// sweeps with bounded parallelism.
//
// CSV: comma-separated, header row, LF endings, %.17g numbers (round-trip
// precision). All files are written to a temporary name and renamed into
// place. Emitted files carry no timestamps, so identical scenarios produce
// byte-identical outputs.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rabibloch/analytics.hpp"
#include "rabibloch/core.hpp"
#include "rabibloch/dynamics.hpp"
#include "rabibloch/floquet.hpp"
#include "rabibloch/observables.hpp"
#include "rabibloch/scenario.hpp"
#include "rabibloch/spectra.hpp"
#include "rabibloch/version.hpp"

namespace rabibloch {

struct RunReport {
    int exit_code = 0;  // 0 ok, 2 config error, 3 numerical failure
    std::string message;
    std::string out_dir;
    double runtime_seconds = 0.0;
    double norm_drift = 0.0;
    int peak_count = 0;
};

namespace detail {

inline std::string fmt_g(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot write " + tmp.string());
        f << content;
        if (!f) throw ConfigError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline double resolve_omega_bar(const Scenario& s) {
    switch (s.spectrum.omega_bar_source) {
        case OmegaBarSource::rwa_quadrature:
            return mean_ro_frequency_rwa(s.params);
        case OmegaBarSource::floquet:
            return mean_ro_frequency_floquet(s.params);
        default:
            return s.spectrum.omega_bar_value;
    }
}

}  // namespace detail

// Execute one scenario and emit its files. Never throws; failures come back
// as exit codes (2 = configuration, 3 = numerical).
inline RunReport run(const Scenario& scenario_in, const std::string& out_dir) {
    namespace fs = std::filesystem;
    RunReport report;
    report.out_dir = out_dir;
    const auto t0 = std::chrono::steady_clock::now();

    Scenario s;
    try {
        s = resolved(scenario_in);
        auto errors = validate(s);
        if (!errors.empty()) {
            std::string msg = "invalid scenario:";
            for (const auto& e : errors) msg += " " + e + ";";
            throw ConfigError(msg);
        }
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw ConfigError("cannot create " + out_dir + ": " + ec.message());
        // probe writability before doing any work
        detail::write_file_atomic(fs::path(out_dir) / "scenario.toml", to_toml(s));
    } catch (const std::exception& e) {
        report.exit_code = 2;
        report.message = e.what();
        return report;
    }

    Trajectory traj;
    try {
        const AmplitudeState initial = make_initial_state(s.params, s.packet);
        traj = evolve(initial, s.params, s.integration);
    } catch (const NumericalError& e) {
        report.exit_code = 3;
        report.message = e.what();
        return report;
    } catch (const std::exception& e) {
        report.exit_code = 2;
        report.message = e.what();
        return report;
    }

    try {
        const fs::path dir(out_dir);
        const std::size_t nsnap = traj.snapshots.size();
        const int n = s.params.n_sites;

        // norm drift relative to the decay-compensated initial norm
        const double norm0 = state_norm(traj.snapshots.front());
        for (const auto& snap : traj.snapshots) {
            const double expected =
                norm0 * std::exp(-s.params.gamma * snap.time);
            report.norm_drift = std::max(
                report.norm_drift,
                std::abs(state_norm(snap) / expected - 1.0));
        }

        std::vector<std::vector<double>> cur(nsnap), inv(nsnap), dip(nsnap);
        for (std::size_t k = 0; k < nsnap; ++k) {
            cur[k] = tunneling_current_density(traj.snapshots[k], s.params);
            inv[k] = inversion_density(traj.snapshots[k]);
            dip[k] = dipole_density(traj.snapshots[k]);
        }

        int stride = s.spectrum.space_time_stride;
        if (stride <= 0)
            stride = std::max<std::size_t>(1, (nsnap + 2047) / 2048);

        {  // observables.csv — long format, strided
            std::ostringstream o;
            o << "t,site,current,inversion,dipole\n";
            for (std::size_t k = 0; k < nsnap; k += stride) {
                const std::string t = detail::fmt_g(traj.snapshots[k].time);
                for (int j = 0; j < n; ++j)
                    o << t << ',' << j << ',' << detail::fmt_g(cur[k][j]) << ','
                      << detail::fmt_g(inv[k][j]) << ','
                      << detail::fmt_g(dip[k][j]) << "\n";
            }
            detail::write_file_atomic(dir / "observables.csv", o.str());
        }
        {  // centroid.csv — full resolution
            std::ostringstream o;
            o << "t,centroid,norm\n";
            for (const auto& snap : traj.snapshots)
                o << detail::fmt_g(snap.time) << ','
                  << detail::fmt_g(centroid(snap)) << ','
                  << detail::fmt_g(state_norm(snap)) << "\n";
            detail::write_file_atomic(dir / "centroid.csv", o.str());
        }
        auto write_grid = [&](const char* name,
                              const std::vector<std::vector<double>>& grid) {
            std::ostringstream o;
            o << "t";
            for (int j = 0; j < n; ++j) o << ",s" << j;
            o << "\n";
            for (std::size_t k = 0; k < nsnap; k += stride) {
                o << detail::fmt_g(traj.snapshots[k].time);
                for (int j = 0; j < n; ++j) o << ',' << detail::fmt_g(grid[k][j]);
                o << "\n";
            }
            detail::write_file_atomic(dir / name, o.str());
        };
        write_grid("spacetime_current.csv", cur);
        write_grid("spacetime_inversion.csv", inv);
        write_grid("spacetime_dipole.csv", dip);

        // spectra + labeled lines per requested site
        bool spectra_skipped = false;
        double omega_bar = 0.0;
        if (!s.spectrum.sites.empty() && nsnap >= 16)
            omega_bar = detail::resolve_omega_bar(s);
        if (!s.spectrum.sites.empty() && nsnap < 16) spectra_skipped = true;

        const struct {
            const char* name;
            const std::vector<std::vector<double>>* grid;
        } obs[] = {{"current", &cur}, {"inversion", &inv}, {"dipole", &dip}};

        double label_tol = s.spectrum.label_tol;
        if (!spectra_skipped) {
            for (int site : s.spectrum.sites) {
                for (const auto& ob : obs) {
                    ObservableSeries series;
                    series.site = site;
                    series.times.reserve(nsnap);
                    series.values.reserve(nsnap);
                    for (std::size_t k = 0; k < nsnap; ++k) {
                        series.times.push_back(traj.snapshots[k].time);
                        series.values.push_back((*ob.grid)[k][site]);
                    }
                    const Spectrum spec = power_spectrum(
                        series, s.spectrum.window, s.spectrum.zero_pad_factor);
                    if (label_tol <= 0.0)
                        label_tol =
                            std::max(bin_width(spec), s.params.bloch / 4.0);
                    auto peaks =
                        find_peaks(spec, s.spectrum.peak_rel_threshold,
                                   s.spectrum.peak_min_separation_bins);
                    peaks = label_peaks(peaks, s.params.omega0, s.params.bloch,
                                        omega_bar, s.spectrum.m_max,
                                        s.spectrum.n_max, label_tol);
                    report.peak_count += static_cast<int>(peaks.size());

                    std::ostringstream o;
                    o << "omega,magnitude\n";
                    for (std::size_t k = 0; k < spec.omegas.size(); ++k)
                        o << detail::fmt_g(spec.omegas[k]) << ','
                          << detail::fmt_g(spec.magnitudes[k]) << "\n";
                    const std::string base =
                        std::string(ob.name) + "_j" + std::to_string(site);
                    detail::write_file_atomic(dir / ("spectrum_" + base + ".csv"),
                                              o.str());

                    nlohmann::json lines;
                    lines["observable"] = ob.name;
                    lines["site"] = site;
                    lines["omega_bar"] = omega_bar;
                    lines["omega_bar_source"] =
                        to_string(s.spectrum.omega_bar_source);
                    lines["label_tol"] = label_tol;
                    lines["bin_width"] = bin_width(spec);
                    lines["peaks"] = nlohmann::json::array();
                    for (const auto& pk : peaks) {
                        nlohmann::json jp;
                        jp["omega"] = pk.omega_peak;
                        jp["magnitude"] = pk.magnitude;
                        if (pk.label) {
                            jp["m"] = pk.label->m;
                            jp["n"] = pk.label->n;
                            jp["p"] = pk.label->p;
                            jp["residual"] = pk.residual;
                        }
                        lines["peaks"].push_back(jp);
                    }
                    detail::write_file_atomic(dir / ("lines_" + base + ".json"),
                                              lines.dump(2) + "\n");
                }
            }
        }

        nlohmann::json meta;
        meta["tool"] = "rabibloch";
        meta["version"] = kVersion;
        meta["scenario"] = to_toml(s);
        meta["solver"] = {{"scheme", "rk4"},
                          {"dt", s.integration.dt},
                          {"t_end", s.integration.t_end},
                          {"record_every", s.integration.record_every},
                          {"lambda_max", lambda_max(s.params)},
                          {"snapshots", nsnap},
                          {"space_time_stride", stride}};
        meta["norm_drift"] = report.norm_drift;
        if (!s.spectrum.sites.empty()) {
            meta["omega_bar"] = omega_bar;
            meta["omega_bar_source"] = to_string(s.spectrum.omega_bar_source);
            meta["spectra_skipped"] = spectra_skipped;
            meta["label_tol"] = label_tol;
        }
        detail::write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");
    } catch (const std::exception& e) {
        report.exit_code = 2;
        report.message = e.what();
        return report;
    }

    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return report;
}

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

struct SweepReport {
    int exit_code = 0;  // 0 if every cell succeeded, else the first failure code
    std::string out_dir;
    std::vector<RunReport> cells;
};

// Cartesian product of the axes over the base scenario; one sub-directory per
// cell plus index.json. Cells run concurrently up to `jobs`; outputs are
// per-cell and deterministic. A failed cell is recorded and the sweep
// continues.
inline SweepReport sweep(const Scenario& base, const std::vector<SweepAxis>& axes,
                         const std::string& out_dir, int jobs = 1) {
    namespace fs = std::filesystem;
    SweepReport report;
    report.out_dir = out_dir;

    std::size_t total = 1;
    for (const auto& ax : axes) {
        if (ax.values.empty()) {
            report.exit_code = 2;
            return report;
        }
        total *= ax.values.size();
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        report.exit_code = 2;
        return report;
    }

    struct Cell {
        std::string dir;
        std::vector<std::pair<std::string, std::string>> overrides;
    };
    std::vector<Cell> cells(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        Cell& c = cells[i];
        for (std::size_t a = axes.size(); a-- > 0;) {
            const auto& ax = axes[a];
            c.overrides.emplace_back(ax.key, ax.values[rem % ax.values.size()]);
            rem /= ax.values.size();
        }
        std::reverse(c.overrides.begin(), c.overrides.end());
        char buf[32];
        std::snprintf(buf, sizeof buf, "cell_%04zu", i);
        c.dir = (fs::path(out_dir) / buf).string();
    }

    report.cells.resize(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) break;
            Scenario s = base;
            RunReport r;
            try {
                for (const auto& [k, v] : cells[i].overrides)
                    apply_override(s, k + "=" + v);
            } catch (const std::exception& e) {
                r.exit_code = 2;
                r.message = e.what();
                r.out_dir = cells[i].dir;
                report.cells[i] = r;
                continue;
            }
            report.cells[i] = run(s, cells[i].dir);
        }
    };
    const int nthreads = std::max(1, jobs);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    nlohmann::json index = nlohmann::json::array();
    for (std::size_t i = 0; i < total; ++i) {
        nlohmann::json cell;
        cell["dir"] = fs::path(cells[i].dir).filename().string();
        nlohmann::json ov = nlohmann::json::object();
        for (const auto& [k, v] : cells[i].overrides) ov[k] = v;
        cell["overrides"] = ov;
        cell["exit_code"] = report.cells[i].exit_code;
        cell["norm_drift"] = report.cells[i].norm_drift;
        cell["peak_count"] = report.cells[i].peak_count;
        if (!report.cells[i].message.empty())
            cell["message"] = report.cells[i].message;
        index.push_back(cell);
        if (report.cells[i].exit_code != 0 && report.exit_code == 0)
            report.exit_code = report.cells[i].exit_code;
    }
    try {
        detail::write_file_atomic(fs::path(out_dir) / "index.json",
                                  index.dump(2) + "\n");
    } catch (const std::exception&) {
        report.exit_code = 2;
    }
    return report;
}

}  // namespace rabibloch
