#pragma once

// Scenario files are a small sectioned key/value format:
//
//   # comment (also after values)
//   experiment = leo_beamforming
//   schemes = FR3, FR4, MMSE, LB_MMSE
//
//   [link]
//   power_dbw = 38
//
// Keys inside a section are addressed as `section.key` (the same names the
// sweep subcommand accepts). Values are numbers, bare words, double-quoted
// strings, or comma-separated lists. Every key is optional; unknown keys and
// duplicate keys are rejected.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "scenario.hpp"

namespace ntnsim {

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

inline std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(value);
    while (std::getline(is, item, ',')) {
        item = unquote(trim(item));
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_double(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return d;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    return out;
}

inline bool parse_switch(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError(key + ": expected on/off, got '" + v + "'");
}

inline Scheme parse_scheme(const std::string& s) {
    if (s == "FR3") return Scheme::kFR3;
    if (s == "FR4") return Scheme::kFR4;
    if (s == "MMSE") return Scheme::kMMSE;
    if (s == "LB_MMSE" || s == "LB-MMSE") return Scheme::kLbMmse;
    if (s == "ZF") return Scheme::kZF;
    throw ConfigError("schemes: unknown scheme '" + s + "' (expected FR3, FR4, MMSE, LB_MMSE, ZF)");
}

using Setter = std::function<void(ScenarioConfig&, const std::string& key, const std::string& value)>;

inline Setter number(double ScenarioConfig::*field) {
    return [field](ScenarioConfig& c, const std::string& k, const std::string& v) { c.*field = parse_double(k, v); };
}

template <class Member>
Setter count(Member member) {
    return [member](ScenarioConfig& c, const std::string& k, const std::string& v) {
        member(c) = static_cast<std::size_t>(parse_uint(k, v));
    };
}

template <class Member>
Setter real(Member member) {
    return [member](ScenarioConfig& c, const std::string& k, const std::string& v) {
        member(c) = parse_double(k, v);
    };
}

template <class Member>
Setter toggle(Member member) {
    return [member](ScenarioConfig& c, const std::string& k, const std::string& v) {
        member(c) = parse_switch(k, v);
    };
}

inline const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        t["experiment"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
            const std::string s = unquote(trim(v));
            if (s == "leo_beamforming")
                c.experiment = Experiment::kLeoBeamforming;
            else if (s == "uav_noma_ee")
                c.experiment = Experiment::kUavNomaEe;
            else
                throw ConfigError(k + ": expected leo_beamforming or uav_noma_ee, got '" + s + "'");
        };
        t["seed"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
            c.master_seed = parse_uint(k, v);
        };
        t["drops"] = count([](ScenarioConfig& c) -> std::size_t& { return c.n_drops; });
        t["workers"] = count([](ScenarioConfig& c) -> std::size_t& { return c.workers; });
        t["output"] = [](ScenarioConfig& c, const std::string&, const std::string& v) { c.output = unquote(trim(v)); };
        t["schemes"] = [](ScenarioConfig& c, const std::string&, const std::string& v) {
            c.schemes.clear();
            for (const auto& s : split_list(v)) {
                const Scheme parsed = parse_scheme(s);
                if (std::find(c.schemes.begin(), c.schemes.end(), parsed) != c.schemes.end())
                    throw ConfigError("schemes: '" + s + "' listed twice");
                c.schemes.push_back(parsed);
            }
        };

        t["geometry.earth_radius_km"] = real([](ScenarioConfig& c) -> double& { return c.geometry.earth_radius_km; });
        t["geometry.altitude_km"] = real([](ScenarioConfig& c) -> double& { return c.geometry.altitude_km; });
        t["geometry.user_min_elevation_deg"] =
            real([](ScenarioConfig& c) -> double& { return c.geometry.user_min_elevation_deg; });
        t["geometry.gateway_min_elevation_deg"] =
            real([](ScenarioConfig& c) -> double& { return c.geometry.gateway_min_elevation_deg; });
        t["geometry.misalignment_ms"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
            if (trim(v) == "auto")
                c.misalignment_ms.reset();
            else
                c.misalignment_ms = parse_double(k, v);
        };

        t["array.rows"] = count([](ScenarioConfig& c) -> std::size_t& { return c.array.n_rows; });
        t["array.cols"] = count([](ScenarioConfig& c) -> std::size_t& { return c.array.n_cols; });
        t["array.spacing_wavelengths"] =
            real([](ScenarioConfig& c) -> double& { return c.array.element_spacing_wavelengths; });
        t["array.max_element_gain_dbi"] =
            real([](ScenarioConfig& c) -> double& { return c.array.max_element_gain_dbi; });
        t["array.pattern_exponent"] = real([](ScenarioConfig& c) -> double& { return c.array.pattern_exponent; });
        t["array.pattern_floor_db"] = real([](ScenarioConfig& c) -> double& { return c.array.pattern_floor_db; });

        t["link.power_dbw"] = real([](ScenarioConfig& c) -> double& { return c.power_dbw; });
        t["link.carrier_hz"] = real([](ScenarioConfig& c) -> double& { return c.carrier_hz; });
        t["link.bandwidth_hz"] = real([](ScenarioConfig& c) -> double& { return c.bandwidth_hz; });
        t["link.rx_gain_dbi"] = real([](ScenarioConfig& c) -> double& { return c.rx_gain_dbi; });
        t["link.g_over_t_dbk"] = real([](ScenarioConfig& c) -> double& { return c.g_over_t_dbk; });

        t["beams.n_beams"] = count([](ScenarioConfig& c) -> std::size_t& { return c.n_beams; });
        t["beams.coverage_half_angle_deg"] =
            real([](ScenarioConfig& c) -> double& { return c.coverage_half_angle_deg; });

        t["users.n_users"] = count([](ScenarioConfig& c) -> std::size_t& { return c.n_users; });
        t["users.location_error_m"] = real([](ScenarioConfig& c) -> double& { return c.location_error_m; });

        t["channel.mode"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
            const std::string s = unquote(trim(v));
            if (s == "clear_sky")
                c.channel_mode = ChannelMode::kClearSky;
            else if (s == "tgpp" || s == "3gpp")
                c.channel_mode = ChannelMode::kTgpp;
            else
                throw ConfigError(k + ": expected clear_sky or tgpp, got '" + s + "'");
        };
        t["channel.atmospheric"] = toggle([](ScenarioConfig& c) -> bool& { return c.impairments.atmospheric_enabled; });
        t["channel.scintillation"] =
            toggle([](ScenarioConfig& c) -> bool& { return c.impairments.scintillation_enabled; });
        t["channel.scintillation_redraw"] =
            toggle([](ScenarioConfig& c) -> bool& { return c.impairments.scintillation_redraw; });
        t["channel.shadowing"] = toggle([](ScenarioConfig& c) -> bool& { return c.impairments.shadowing_enabled; });
        t["channel.atmospheric_loss_db"] =
            real([](ScenarioConfig& c) -> double& { return c.impairments.atmospheric_loss_db; });
        t["channel.scintillation_sigma_db"] =
            real([](ScenarioConfig& c) -> double& { return c.impairments.scintillation_sigma_db; });
        t["channel.shadow_sigma_db"] = real([](ScenarioConfig& c) -> double& { return c.impairments.shadow_sigma_db; });
        t["channel.estimation_noise_db"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
            if (trim(v) == "off")
                c.estimation_noise_db.reset();
            else
                c.estimation_noise_db = parse_double(k, v);
        };

        t["noma.n_ues"] = count([](ScenarioConfig& c) -> std::size_t& { return c.noma.n_ues; });
        t["noma.n_subcarriers"] = count([](ScenarioConfig& c) -> std::size_t& { return c.noma.n_subcarriers; });
        t["noma.bandwidth_hz"] = real([](ScenarioConfig& c) -> double& { return c.noma.bandwidth_hz; });
        t["noma.max_ue_power_w"] = real([](ScenarioConfig& c) -> double& { return c.noma.max_ue_power_w; });
        t["noma.circuit_power_w"] = real([](ScenarioConfig& c) -> double& { return c.noma.circuit_power_w; });
        t["noma.frame_s"] = real([](ScenarioConfig& c) -> double& { return c.noma.frame_s; });
        t["noma.carrier_hz"] = real([](ScenarioConfig& c) -> double& { return c.noma.carrier_hz; });
        t["noma.uav_altitude_m"] = real([](ScenarioConfig& c) -> double& { return c.noma.uav_altitude_m; });
        t["noma.cell_radius_m"] = real([](ScenarioConfig& c) -> double& { return c.noma.cell_radius_m; });
        t["noma.pathloss_exponent"] = real([](ScenarioConfig& c) -> double& { return c.noma.pathloss_exponent; });
        t["noma.noise_psd_dbm_hz"] = real([](ScenarioConfig& c) -> double& { return c.noma.noise_psd_dbm_hz; });
        t["noma.k_min"] = count([](ScenarioConfig& c) -> std::size_t& { return c.noma.k_min; });
        t["noma.k_max"] = count([](ScenarioConfig& c) -> std::size_t& { return c.noma.k_max; });
        t["noma.elbow_threshold"] = real([](ScenarioConfig& c) -> double& { return c.noma.elbow_threshold; });
        t["noma.ftest_alpha"] = real([](ScenarioConfig& c) -> double& { return c.noma.ftest_alpha; });
        t["noma.data_sizes_bits"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
            c.noma.data_sizes_bits.clear();
            for (const auto& item : split_list(v)) c.noma.data_sizes_bits.push_back(parse_double(k, item));
        };
        return t;
    }();
    return table;
}

}  // namespace detail

inline std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, _] : detail::setters()) keys.push_back(k);
    return keys;
}

/// Sets one dotted key; used by the loader and by sweep overrides.
inline void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    const auto& table = detail::setters();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
    it->second(cfg, key, value);
}

/// Parses scenario text without validating cross-field invariants.
inline ScenarioConfig parse_config(std::istream& is, const std::string& source = "<config>") {
    ScenarioConfig cfg;
    std::string section;
    std::string raw;
    std::map<std::string, int> seen;
    for (int line_no = 1; std::getline(is, raw); ++line_no) {
        const auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
        // Strip comments outside quotes.
        bool quoted = false;
        std::size_t cut = raw.size();
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == '"') quoted = !quoted;
            if (!quoted && (raw[i] == '#' || raw[i] == ';')) {
                cut = i;
                break;
            }
        }
        const std::string line = detail::trim(std::string_view(raw).substr(0, cut));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where() + "unterminated section header");
            section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where() + "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where() + "expected 'key = value'");
        const std::string name = detail::trim(std::string_view(line).substr(0, eq));
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (name.empty()) throw ConfigError(where() + "missing key before '='");
        if (value.empty()) throw ConfigError(where() + "missing value for '" + name + "'");
        const std::string key = section.empty() ? name : section + "." + name;
        if (const auto prev = seen.find(key); prev != seen.end())
            throw ConfigError(where() + "duplicate key '" + key + "' (first set on line " +
                              std::to_string(prev->second) + ")");
        seen[key] = line_no;
        try {
            apply_override(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where() + e.what());
        }
    }
    return cfg;
}

/// Reads and validates a scenario file. Missing keys keep their defaults.
inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    ScenarioConfig cfg = parse_config(in, path);
    cfg.validate();
    return cfg;
}

}  // namespace ntnsim
