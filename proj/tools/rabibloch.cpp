// rabibloch — scenario runner and spectral line toolkit for driven two-level
// chains. Subcommands: run, spectrum, lines, sweep.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rabibloch/analytics.hpp"
#include "rabibloch/floquet.hpp"
#include "rabibloch/runner.hpp"
#include "rabibloch/scenario.hpp"
#include "rabibloch/spectra.hpp"
#include "rabibloch/version.hpp"

namespace {

using namespace rabibloch;

Scenario load_with_overrides(const std::string& name_or_path,
                             const std::vector<std::string>& sets) {
    Scenario s = load_scenario(name_or_path);
    for (const auto& kv : sets) apply_override(s, kv);
    return s;
}

int print_report(const RunReport& r) {
    if (r.exit_code != 0) {
        std::cerr << "error (" << (r.exit_code == 2 ? "config" : "numerical")
                  << "): " << r.message << "\n";
        return r.exit_code;
    }
    std::printf("run ok: %s\n", r.out_dir.c_str());
    std::printf("  runtime     %.3f s\n", r.runtime_seconds);
    std::printf("  norm drift  %.3e\n", r.norm_drift);
    std::printf("  peaks       %d\n", r.peak_count);
    return 0;
}

// Minimal CSV column reader. With site >= 0 the file is long-format and rows
// are filtered on their "site" column.
ObservableSeries read_series(const std::string& path, const std::string& column,
                             int site) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open " + path);
    std::string header;
    if (!std::getline(f, header)) throw ConfigError(path + ": empty file");
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    const auto names = split(header);
    int t_col = -1, v_col = -1, s_col = -1;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == "t") t_col = static_cast<int>(i);
        if (names[i] == column) v_col = static_cast<int>(i);
        if (names[i] == "site") s_col = static_cast<int>(i);
    }
    if (t_col < 0) throw ConfigError(path + ": no 't' column");
    if (v_col < 0) throw ConfigError(path + ": no '" + column + "' column");
    if (site >= 0 && s_col < 0)
        throw ConfigError(path + ": --site given but no 'site' column");

    ObservableSeries out;
    out.site = site;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (site >= 0 && std::stol(cells[s_col]) != site) continue;
        out.times.push_back(std::stod(cells[t_col]));
        out.values.push_back(std::stod(cells[v_col]));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rabi-Bloch chain simulator and spectral-line toolkit"};
    app.set_version_flag("--version", std::string("rabibloch ") + kVersion);
    app.require_subcommand(1);

    // ------------------------------------------------------------- run ----
    auto* cmd_run = app.add_subcommand("run", "run one scenario and emit files");
    std::string run_scenario, run_out;
    std::vector<std::string> run_sets;
    cmd_run->add_option("--scenario", run_scenario, "preset name or config path")
        ->required();
    cmd_run->add_option("--set", run_sets, "override key=value (repeatable)");
    cmd_run->add_option("--out", run_out, "output directory")->required();

    // -------------------------------------------------------- spectrum ----
    auto* cmd_spec =
        app.add_subcommand("spectrum", "spectrum of a column of an emitted CSV");
    std::string sp_input, sp_column, sp_out, sp_omega_bar = "auto", sp_params;
    int sp_site = -1, sp_pad = 2;
    bool sp_label = false;
    std::string sp_window = "hann";
    cmd_spec->add_option("--input", sp_input, "input CSV with a 't' column")
        ->required();
    cmd_spec->add_option("--column", sp_column, "value column name")->required();
    cmd_spec->add_option("--site", sp_site,
                         "filter long-format rows on this site");
    cmd_spec->add_option("--out", sp_out, "output directory")->required();
    cmd_spec->add_flag("--label", sp_label, "label peaks against the line comb");
    cmd_spec->add_option("--omega-bar", sp_omega_bar,
                         "auto | floquet | <value> (with --label)");
    cmd_spec->add_option("--params", sp_params,
                         "scenario supplying omega0/bloch (with --label)");
    cmd_spec->add_option("--window", sp_window, "rect|hann");
    cmd_spec->add_option("--pad", sp_pad, "zero padding factor");

    // ----------------------------------------------------------- lines ----
    auto* cmd_lines =
        app.add_subcommand("lines", "print the predicted spectral line comb");
    std::string ln_params;
    bool ln_floquet = false;
    int ln_m_max = 2, ln_n_max = 8;
    cmd_lines->add_option("--params", ln_params, "preset name or config path")
        ->required();
    cmd_lines->add_flag("--floquet", ln_floquet,
                        "mean RO frequency from the Floquet splitting");
    cmd_lines->add_option("--m-max", ln_m_max, "max |m|");
    cmd_lines->add_option("--n-max", ln_n_max, "max |n|");

    // ----------------------------------------------------------- sweep ----
    auto* cmd_sweep = app.add_subcommand("sweep", "Cartesian parameter sweep");
    std::string sw_scenario, sw_out;
    std::vector<std::string> sw_axes, sw_sets;
    int sw_jobs = 1;
    cmd_sweep->add_option("--scenario", sw_scenario, "base preset or config")
        ->required();
    cmd_sweep->add_option("--set", sw_sets, "base override key=value");
    cmd_sweep
        ->add_option("--axis", sw_axes, "axis key=v1,v2,... (repeatable)")
        ->required();
    cmd_sweep->add_option("--out", sw_out, "output directory")->required();
    cmd_sweep->add_option("--jobs", sw_jobs, "parallel cells");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_run) {
            return print_report(run(load_with_overrides(run_scenario, run_sets),
                                    run_out));
        }

        if (*cmd_spec) {
            ObservableSeries series = read_series(sp_input, sp_column, sp_site);
            Window win = sp_window == "rect" ? Window::rect : Window::hann;
            const Spectrum spec = power_spectrum(series, win, sp_pad);
            std::filesystem::create_directories(sp_out);
            std::ostringstream o;
            o << "omega,magnitude\n";
            for (std::size_t k = 0; k < spec.omegas.size(); ++k)
                o << rabibloch::detail::fmt_g(spec.omegas[k]) << ','
                  << rabibloch::detail::fmt_g(spec.magnitudes[k]) << "\n";
            const std::string base =
                sp_column + (sp_site >= 0 ? "_j" + std::to_string(sp_site) : "");
            rabibloch::detail::write_file_atomic(
                std::filesystem::path(sp_out) / ("spectrum_" + base + ".csv"),
                o.str());

            if (sp_label) {
                if (sp_params.empty())
                    throw ConfigError("--label requires --params");
                const Scenario ps = resolved(load_scenario(sp_params));
                double omega_bar = 0.0;
                std::string source;
                if (sp_omega_bar == "auto") {
                    omega_bar = mean_ro_frequency_rwa(ps.params);
                    source = "rwa-quadrature";
                } else if (sp_omega_bar == "floquet") {
                    omega_bar = mean_ro_frequency_floquet(ps.params);
                    source = "floquet";
                } else {
                    omega_bar = rabibloch::detail::parse_double(sp_omega_bar,
                                                                "--omega-bar");
                    source = "fixed";
                }
                const double tol =
                    std::max(bin_width(spec), ps.params.bloch / 4.0);
                auto peaks = find_peaks(spec, ps.spectrum.peak_rel_threshold,
                                        ps.spectrum.peak_min_separation_bins);
                peaks = label_peaks(peaks, ps.params.omega0, ps.params.bloch,
                                    omega_bar, ps.spectrum.m_max,
                                    ps.spectrum.n_max, tol);
                nlohmann::json lines;
                lines["omega_bar"] = omega_bar;
                lines["omega_bar_source"] = source;
                lines["label_tol"] = tol;
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
                rabibloch::detail::write_file_atomic(
                    std::filesystem::path(sp_out) / ("lines_" + base + ".json"),
                    lines.dump(2) + "\n");
            }
            return 0;
        }

        if (*cmd_lines) {
            const Scenario ps = resolved(load_scenario(ln_params));
            const double omega_bar = ln_floquet
                                         ? mean_ro_frequency_floquet(ps.params)
                                         : mean_ro_frequency_rwa(ps.params);
            std::printf("# omega_bar = %.12g (%s)\n", omega_bar,
                        ln_floquet ? "floquet" : "rwa-quadrature");
            std::printf("freq,m,n,p\n");
            for (const auto& line :
                 predicted_lines(ps.params, omega_bar, ln_m_max, ln_n_max))
                std::printf("%.12g,%d,%d,%d\n", line.freq, line.m, line.n,
                            line.p);
            return 0;
        }

        if (*cmd_sweep) {
            Scenario base = load_with_overrides(sw_scenario, sw_sets);
            std::vector<SweepAxis> axes;
            for (const auto& spec_str : sw_axes) {
                const auto eq = spec_str.find('=');
                if (eq == std::string::npos)
                    throw ConfigError("--axis '" + spec_str +
                                      "' is not key=v1,v2,...");
                SweepAxis ax;
                ax.key = spec_str.substr(0, eq);
                std::stringstream ss(spec_str.substr(eq + 1));
                std::string item;
                while (std::getline(ss, item, ',')) ax.values.push_back(item);
                if (ax.values.empty())
                    throw ConfigError("--axis '" + spec_str + "' has no values");
                axes.push_back(ax);
            }
            const SweepReport rep = sweep(base, axes, sw_out, sw_jobs);
            std::printf("sweep: %zu cells -> %s\n", rep.cells.size(),
                        rep.out_dir.c_str());
            int failed = 0;
            for (const auto& c : rep.cells)
                if (c.exit_code != 0) ++failed;
            if (failed > 0)
                std::printf("  %d cell(s) failed (see index.json)\n", failed);
            return rep.exit_code;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error (config): " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "error (numerical): " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
