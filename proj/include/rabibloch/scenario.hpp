// scenario.hpp — Named, serializable run configurations: figure presets, a
// flat TOML-style config format with sections [chain] [drive] [loss] [init]
// [integrate] [spectrum], and key=value overrides.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabibloch/core.hpp"
#include "rabibloch/dynamics.hpp"
#include "rabibloch/spectra.hpp"

namespace rabibloch {

// Configuration mistakes (bad file, bad key, bad preset). Mapped to exit
// code 2 by the CLI, as opposed to NumericalError (exit 3).
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class OmegaBarSource { rwa_quadrature, floquet, fixed };

inline const char* to_string(OmegaBarSource s) {
    switch (s) {
        case OmegaBarSource::rwa_quadrature: return "rwa-quadrature";
        case OmegaBarSource::floquet: return "floquet";
        default: return "fixed";
    }
}

struct SpectrumSettings {
    std::vector<int> sites;
    Window window = Window::hann;
    int zero_pad_factor = 2;
    int m_max = 2;
    int n_max = 8;
    double label_tol = 0.0;  // 0 = auto: max(bin width, bloch/4)
    OmegaBarSource omega_bar_source = OmegaBarSource::floquet;
    double omega_bar_value = 0.0;  // used when source == fixed
    double peak_rel_threshold = 0.01;
    int peak_min_separation_bins = 4;
    int space_time_stride = 0;  // 0 = auto (targets <= 2048 grid rows)
};

struct Scenario {
    std::string name = "custom";
    ChainParams params;
    GaussianPacket packet;
    IntegrationSettings integration{0.0, 0.0, 0, Scheme::rk4};  // 0 = auto
    SpectrumSettings spectrum;
};

// Fill the auto fields: dt from the step budget, record_every targeting a
// 0.1 sampling interval, t_end = max(8 Bloch periods, 40 unit periods).
inline Scenario resolved(Scenario s) {
    if (s.integration.dt <= 0.0)
        s.integration.dt = std::min(0.1 / lambda_max(s.params), 0.01);
    if (s.integration.t_end <= 0.0) {
        double t = 40.0 * 2.0 * M_PI / s.params.omega0;
        if (s.params.bloch > 0.0)
            t = std::max(t, 8.0 * 2.0 * M_PI / s.params.bloch);
        s.integration.t_end = t;
    }
    if (s.integration.record_every <= 0)
        s.integration.record_every =
            std::max(1, static_cast<int>(std::floor(0.1 / s.integration.dt + 1e-9)));
    return s;
}

inline std::vector<std::string> validate(const Scenario& s) {
    Scenario r = resolved(s);
    std::vector<std::string> errors = validate(r.params);
    for (auto& e : validate(r.integration, r.params)) errors.push_back(e);
    if (r.packet.width_sites < 0.0) errors.push_back("width_sites must be >= 0");
    for (int site : r.spectrum.sites)
        if (site < 0 || site >= r.params.n_sites)
            errors.push_back("spectrum site " + std::to_string(site) +
                             " out of range");
    if (r.spectrum.zero_pad_factor < 1)
        errors.push_back("zero_pad_factor must be >= 1");
    if (r.spectrum.m_max < 0 || r.spectrum.n_max < 0)
        errors.push_back("m_max and n_max must be >= 0");
    if (r.spectrum.omega_bar_source == OmegaBarSource::fixed &&
        !(r.spectrum.omega_bar_value > 0.0))
        errors.push_back("fixed omega_bar requires a positive value");
    if (r.spectrum.omega_bar_source == OmegaBarSource::floquet &&
        !(r.params.drive_freq > 0.0))
        errors.push_back("floquet omega_bar requires drive_freq > 0");
    return errors;
}

// ---------------------------------------------------------------- presets --

namespace detail {

inline Scenario figure_base() {
    Scenario s;
    s.params.n_sites = 128;
    s.params.lattice_const_nm = 20.0;
    s.params.omega0 = 1.0;
    s.params.drive_freq = 1.0;
    s.params.boundary = Boundary::open;
    s.params.mode = DriveMode::full;
    s.packet = {80.0, 20.0, true, 0.0};
    return s;
}

}  // namespace detail

// Figure presets. Several figures share one run and differ only in which
// observable is plotted; those names map to the same scenario.
inline std::vector<std::string> preset_names() {
    return {"fig3", "fig4", "fig5", "fig6", "fig7", "fig9",
            "fig11", "fig12", "fig13", "fig15", "fig18", "fig20"};
}

inline Scenario preset(const std::string& name) {
    Scenario s = detail::figure_base();
    s.name = name;
    if (name == "fig3" || name == "fig5" || name == "fig7" || name == "fig9") {
        s.params.rabi = 0.8;
        s.params.bloch = 0.04;
        s.params.t_a = 0.4;
        s.params.t_b = 0.04;
        s.spectrum.sites = {90};
    } else if (name == "fig4" || name == "fig6") {
        s.params.rabi = 0.8;
        s.params.bloch = 0.04;
        s.params.t_a = 0.04;
        s.params.t_b = 0.04;
        s.spectrum.sites = {90};
    } else if (name == "fig11" || name == "fig12") {
        s.params.rabi = 0.8;
        s.params.bloch = 0.7;
        s.params.t_a = 7.0;
        s.params.t_b = 7.0;
        s.spectrum.sites = {60};
    } else if (name == "fig13") {
        s.params.rabi = 0.5;
        s.params.bloch = 0.5;
        s.params.t_a = 5.0;
        s.params.t_b = 5.0;
        s.spectrum.sites = {60};
    } else if (name == "fig15") {
        s.params.rabi = 0.8;
        s.params.bloch = 0.7;
        s.params.t_a = 7.0;
        s.params.t_b = 7.0;
        s.params.gamma = gamma_from_q(1.0, 15.0);
        s.spectrum.sites = {60};
    } else if (name == "fig18" || name == "fig20") {
        s.params.mode = DriveMode::stark;
        s.params.drive_freq = 0.0;
        s.params.rabi = 1.0;  // resonance condition Omega_R ~ omega0
        s.params.bloch = 0.9;
        s.params.t_a = 9.0;
        s.params.t_b = 9.0;
        s.spectrum.sites = {60};
        s.spectrum.omega_bar_source = OmegaBarSource::rwa_quadrature;
    } else {
        std::string names;
        for (const auto& n : preset_names()) names += n + " ";
        throw ConfigError("unknown preset '" + name + "'; available: " + names);
    }
    return s;
}

// ------------------------------------------------------- key/value access --

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

inline double parse_double(const std::string& raw, const std::string& key) {
    const std::string v = unquote(trim(raw));
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': cannot parse number from '" + raw +
                          "'");
    return x;
}

inline long parse_int(const std::string& raw, const std::string& key) {
    const std::string v = unquote(trim(raw));
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': cannot parse integer from '" + raw +
                          "'");
    return x;
}

inline std::vector<int> parse_int_array(const std::string& raw,
                                        const std::string& key) {
    std::string v = trim(raw);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw ConfigError("key '" + key + "': expected [a, b, ...]");
    v = v.substr(1, v.size() - 2);
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(static_cast<int>(parse_int(item, key)));
    }
    return out;
}

}  // namespace detail

// Apply one "section.key" (or unambiguous bare key) assignment. Shared by the
// config loader and --set overrides.
inline void set_scenario_key(Scenario& s, const std::string& key,
                             const std::string& raw) {
    using detail::parse_double;
    using detail::parse_int;
    using detail::parse_int_array;
    const std::string v = detail::unquote(detail::trim(raw));

    auto is = [&](const char* full, const char* bare) {
        return key == full || key == bare;
    };

    if (is("name", "name")) { s.name = v; return; }

    if (is("chain.n_sites", "n_sites")) {
        s.params.n_sites = static_cast<int>(parse_int(raw, key));
    } else if (is("chain.lattice_const_nm", "lattice_const_nm")) {
        s.params.lattice_const_nm = parse_double(raw, key);
    } else if (is("chain.t_a", "t_a")) {
        s.params.t_a = parse_double(raw, key);
    } else if (is("chain.t_b", "t_b")) {
        s.params.t_b = parse_double(raw, key);
    } else if (is("chain.boundary", "boundary")) {
        if (v == "open") s.params.boundary = Boundary::open;
        else if (v == "periodic") s.params.boundary = Boundary::periodic;
        else throw ConfigError("boundary must be open|periodic, got '" + v + "'");
    } else if (is("drive.omega0", "omega0")) {
        s.params.omega0 = parse_double(raw, key);
    } else if (is("drive.drive_freq", "drive_freq")) {
        s.params.drive_freq = parse_double(raw, key);
    } else if (is("drive.rabi", "rabi")) {
        s.params.rabi = parse_double(raw, key);
    } else if (is("drive.bloch", "bloch")) {
        s.params.bloch = parse_double(raw, key);
    } else if (is("drive.mode", "mode")) {
        if (v == "full") s.params.mode = DriveMode::full;
        else if (v == "rwa") s.params.mode = DriveMode::rwa;
        else if (v == "stark") s.params.mode = DriveMode::stark;
        else throw ConfigError("mode must be full|rwa|stark, got '" + v + "'");
    } else if (is("loss.gamma", "gamma")) {
        s.params.gamma = parse_double(raw, key);
    } else if (is("loss.q_factor", "q_factor")) {
        s.params.gamma = gamma_from_q(s.params.omega0, parse_double(raw, key));
    } else if (is("init.center_site", "center_site")) {
        s.packet.center_site = parse_double(raw, key);
    } else if (is("init.width_sites", "width_sites")) {
        s.packet.width_sites = parse_double(raw, key);
    } else if (is("init.band", "band")) {
        if (v == "excited") s.packet.excited = true;
        else if (v == "ground") s.packet.excited = false;
        else throw ConfigError("band must be excited|ground, got '" + v + "'");
    } else if (is("init.phase_per_site", "phase_per_site")) {
        s.packet.phase_per_site = parse_double(raw, key);
    } else if (is("integrate.dt", "dt")) {
        s.integration.dt = parse_double(raw, key);
    } else if (is("integrate.t_end", "t_end")) {
        s.integration.t_end = parse_double(raw, key);
    } else if (is("integrate.record_every", "record_every")) {
        s.integration.record_every = static_cast<int>(parse_int(raw, key));
    } else if (is("integrate.scheme", "scheme")) {
        if (v != "rk4") throw ConfigError("scheme must be rk4, got '" + v + "'");
        s.integration.scheme = Scheme::rk4;
    } else if (is("spectrum.sites", "sites")) {
        s.spectrum.sites = parse_int_array(raw, key);
    } else if (is("spectrum.window", "window")) {
        if (v == "rect") s.spectrum.window = Window::rect;
        else if (v == "hann") s.spectrum.window = Window::hann;
        else throw ConfigError("window must be rect|hann, got '" + v + "'");
    } else if (is("spectrum.zero_pad_factor", "zero_pad_factor")) {
        s.spectrum.zero_pad_factor = static_cast<int>(parse_int(raw, key));
    } else if (is("spectrum.m_max", "m_max")) {
        s.spectrum.m_max = static_cast<int>(parse_int(raw, key));
    } else if (is("spectrum.n_max", "n_max")) {
        s.spectrum.n_max = static_cast<int>(parse_int(raw, key));
    } else if (is("spectrum.label_tol", "label_tol")) {
        s.spectrum.label_tol = parse_double(raw, key);
    } else if (is("spectrum.omega_bar", "omega_bar")) {
        if (v == "rwa-quadrature" || v == "rwa") {
            s.spectrum.omega_bar_source = OmegaBarSource::rwa_quadrature;
        } else if (v == "floquet") {
            s.spectrum.omega_bar_source = OmegaBarSource::floquet;
        } else {
            s.spectrum.omega_bar_source = OmegaBarSource::fixed;
            s.spectrum.omega_bar_value = parse_double(raw, key);
        }
    } else if (is("spectrum.peak_rel_threshold", "peak_rel_threshold")) {
        s.spectrum.peak_rel_threshold = parse_double(raw, key);
    } else if (is("spectrum.peak_min_separation_bins",
                  "peak_min_separation_bins")) {
        s.spectrum.peak_min_separation_bins =
            static_cast<int>(parse_int(raw, key));
    } else if (is("spectrum.space_time_stride", "space_time_stride")) {
        s.spectrum.space_time_stride = static_cast<int>(parse_int(raw, key));
    } else {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
}

// Parse a "key=value" override.
inline void apply_override(Scenario& s, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not key=value");
    set_scenario_key(s, detail::trim(assignment.substr(0, eq)),
                     assignment.substr(eq + 1));
}

// Parse a config file in the flat TOML subset. Unknown sections/keys and
// malformed lines are reported with their line number.
inline Scenario parse_scenario_text(const std::string& text,
                                    const std::string& origin) {
    Scenario s;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside quotes
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line = line.substr(0, i);
                break;
            }
        }
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": malformed section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        try {
            set_scenario_key(s, full, value);
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " +
                              e.what());
        }
    }
    return s;
}

// Preset name or config file path.
inline Scenario load_scenario(const std::string& name_or_path) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end())
        return preset(name_or_path);
    std::ifstream f(name_or_path);
    if (!f) {
        std::string available;
        for (const auto& n : names) available += n + " ";
        throw ConfigError("'" + name_or_path +
                          "' is neither a preset nor a readable file; presets: " +
                          available);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_scenario_text(ss.str(), name_or_path);
}

// Serialize with full round-trip precision; load_scenario on the result
// reproduces the scenario.
inline std::string to_toml(const Scenario& s) {
    std::ostringstream o;
    char buf[64];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    o << "name = \"" << s.name << "\"\n\n";
    o << "[chain]\n";
    o << "n_sites = " << s.params.n_sites << "\n";
    o << "lattice_const_nm = " << num(s.params.lattice_const_nm) << "\n";
    o << "t_a = " << num(s.params.t_a) << "\n";
    o << "t_b = " << num(s.params.t_b) << "\n";
    o << "boundary = \"" << to_string(s.params.boundary) << "\"\n\n";
    o << "[drive]\n";
    o << "omega0 = " << num(s.params.omega0) << "\n";
    o << "drive_freq = " << num(s.params.drive_freq) << "\n";
    o << "rabi = " << num(s.params.rabi) << "\n";
    o << "bloch = " << num(s.params.bloch) << "\n";
    o << "mode = \"" << to_string(s.params.mode) << "\"\n\n";
    o << "[loss]\n";
    o << "gamma = " << num(s.params.gamma) << "\n\n";
    o << "[init]\n";
    o << "center_site = " << num(s.packet.center_site) << "\n";
    o << "width_sites = " << num(s.packet.width_sites) << "\n";
    o << "band = \"" << (s.packet.excited ? "excited" : "ground") << "\"\n";
    o << "phase_per_site = " << num(s.packet.phase_per_site) << "\n\n";
    o << "[integrate]\n";
    o << "dt = " << num(s.integration.dt) << "\n";
    o << "t_end = " << num(s.integration.t_end) << "\n";
    o << "record_every = " << s.integration.record_every << "\n";
    o << "scheme = \"rk4\"\n\n";
    o << "[spectrum]\n";
    o << "sites = [";
    for (std::size_t i = 0; i < s.spectrum.sites.size(); ++i)
        o << (i ? ", " : "") << s.spectrum.sites[i];
    o << "]\n";
    o << "window = \"" << to_string(s.spectrum.window) << "\"\n";
    o << "zero_pad_factor = " << s.spectrum.zero_pad_factor << "\n";
    o << "m_max = " << s.spectrum.m_max << "\n";
    o << "n_max = " << s.spectrum.n_max << "\n";
    o << "label_tol = " << num(s.spectrum.label_tol) << "\n";
    if (s.spectrum.omega_bar_source == OmegaBarSource::fixed)
        o << "omega_bar = " << num(s.spectrum.omega_bar_value) << "\n";
    else
        o << "omega_bar = \"" << to_string(s.spectrum.omega_bar_source) << "\"\n";
    o << "peak_rel_threshold = " << num(s.spectrum.peak_rel_threshold) << "\n";
    o << "peak_min_separation_bins = " << s.spectrum.peak_min_separation_bins
      << "\n";
    o << "space_time_stride = " << s.spectrum.space_time_stride << "\n";
    return o.str();
}

}  // namespace rabibloch
