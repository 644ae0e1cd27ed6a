#pragma once

// Scenario parameterisation shared by the config loader, the Monte-Carlo
// runner and the CLI.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "antenna.hpp"
#include "channel.hpp"
#include "errors.hpp"
#include "geometry.hpp"

namespace ntnsim {

enum class Experiment { kLeoBeamforming, kUavNomaEe };
enum class ChannelMode { kClearSky, kTgpp };
enum class Scheme { kFR3, kFR4, kMMSE, kLbMmse, kZF };

inline std::string to_string(Experiment e) {
    return e == Experiment::kLeoBeamforming ? "leo_beamforming" : "uav_noma_ee";
}

inline std::string to_string(ChannelMode m) { return m == ChannelMode::kClearSky ? "clear_sky" : "tgpp"; }

inline std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::kFR3: return "FR3";
        case Scheme::kFR4: return "FR4";
        case Scheme::kMMSE: return "MMSE";
        case Scheme::kLbMmse: return "LB_MMSE";
        case Scheme::kZF: return "ZF";
    }
    return "?";
}

inline bool is_user_centric(Scheme s) { return s == Scheme::kMMSE || s == Scheme::kLbMmse || s == Scheme::kZF; }

/// UAV-assisted uplink NOMA scenario parameters.
struct NomaConfig {
    std::size_t n_ues = 70;
    std::size_t n_subcarriers = 128;
    double bandwidth_hz = 10e6;
    double max_ue_power_w = 0.2;
    double circuit_power_w = 1.4002;
    double frame_s = 1.0;
    double carrier_hz = 2e9;
    double uav_altitude_m = 100.0;
    double cell_radius_m = 500.0;
    double pathloss_exponent = 2.7;
    double noise_psd_dbm_hz = -174.0;
    std::size_t k_min = 1;
    std::size_t k_max = 8;
    double elbow_threshold = 0.10;
    double ftest_alpha = 0.05;
    std::vector<double> data_sizes_bits{2e5, 4e5, 6e5, 8e5, 1e6};

    void validate() const {
        if (n_ues == 0) throw ConfigError("noma.n_ues must be positive");
        if (n_subcarriers == 0) throw ConfigError("noma.n_subcarriers must be positive");
        if (!(bandwidth_hz > 0.0)) throw ConfigError("noma.bandwidth_hz must be positive");
        if (!(max_ue_power_w > 0.0)) throw ConfigError("noma.max_ue_power_w must be positive");
        if (!(circuit_power_w >= 0.0)) throw ConfigError("noma.circuit_power_w must be non-negative");
        if (!(frame_s > 0.0)) throw ConfigError("noma.frame_s must be positive");
        if (!(carrier_hz > 0.0)) throw ConfigError("noma.carrier_hz must be positive");
        if (!(uav_altitude_m > 0.0)) throw ConfigError("noma.uav_altitude_m must be positive");
        if (!(cell_radius_m > 0.0)) throw ConfigError("noma.cell_radius_m must be positive");
        if (!(pathloss_exponent > 0.0)) throw ConfigError("noma.pathloss_exponent must be positive");
        if (!std::isfinite(noise_psd_dbm_hz)) throw ConfigError("noma.noise_psd_dbm_hz must be finite");
        if (k_min < 1 || k_min > k_max) throw ConfigError("noma.k_min must satisfy 1 <= k_min <= k_max");
        if (k_max > n_ues) throw ConfigError("noma.k_max cannot exceed noma.n_ues");
        if (k_max > n_subcarriers) throw ConfigError("noma.k_max cannot exceed noma.n_subcarriers");
        if (!(elbow_threshold > 0.0 && elbow_threshold < 1.0))
            throw ConfigError("noma.elbow_threshold must lie in (0, 1)");
        if (!(ftest_alpha > 0.0 && ftest_alpha < 1.0)) throw ConfigError("noma.ftest_alpha must lie in (0, 1)");
        if (data_sizes_bits.empty()) throw ConfigError("noma.data_sizes_bits must not be empty");
        for (double d : data_sizes_bits)
            if (!(d > 0.0)) throw ConfigError("noma.data_sizes_bits entries must be positive");
    }
};

struct ScenarioConfig {
    Experiment experiment = Experiment::kLeoBeamforming;

    GeometryContext geometry;
    /// Overrides the geometric misalignment interval when set.
    std::optional<double> misalignment_ms;

    ArrayGeometry array;

    double power_dbw = 38.0;
    double carrier_hz = 20e9;
    double bandwidth_hz = 400e6;
    double rx_gain_dbi = 39.7;
    double g_over_t_dbk = 15.9;

    std::size_t n_beams = 19;
    double coverage_half_angle_deg = 20.0;

    std::size_t n_users = 50;
    double location_error_m = 0.0;

    ChannelMode channel_mode = ChannelMode::kTgpp;
    ImpairmentProfile impairments;
    std::optional<double> estimation_noise_db;

    std::vector<Scheme> schemes{Scheme::kFR3, Scheme::kFR4, Scheme::kMMSE, Scheme::kLbMmse};

    std::size_t n_drops = 200;
    std::uint64_t master_seed = 1;
    std::size_t workers = 1;
    std::string output;

    NomaConfig noma;

    double power_w() const { return std::pow(10.0, power_dbw / 10.0); }

    double effective_misalignment_ms() const {
        return misalignment_ms ? *misalignment_ms : misalignment_interval(geometry);
    }

    void validate() const {
        try {
            geometry.validate();
        } catch (const DomainError& e) {
            throw ConfigError(std::string("geometry: ") + e.what());
        }
        array.validate();
        impairments.validate();
        if (!std::isfinite(power_dbw)) throw ConfigError("link.power_dbw must be finite");
        if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) throw ConfigError("link.carrier_hz must be positive");
        if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
            throw ConfigError("link.bandwidth_hz must be positive");
        if (!std::isfinite(rx_gain_dbi)) throw ConfigError("link.rx_gain_dbi must be finite");
        if (!std::isfinite(g_over_t_dbk)) throw ConfigError("link.g_over_t_dbk must be finite");
        if (misalignment_ms && !(*misalignment_ms >= 0.0))
            throw ConfigError("geometry.misalignment_ms must be non-negative");
        if (n_beams == 0) throw ConfigError("beams.n_beams must be positive");
        if (n_beams > ssb_beam_cap(carrier_hz))
            throw ConfigError("beams.n_beams exceeds the SSB cap of " + std::to_string(ssb_beam_cap(carrier_hz)));
        if (!(coverage_half_angle_deg > 0.0 && coverage_half_angle_deg < 90.0))
            throw ConfigError("beams.coverage_half_angle_deg must lie in (0, 90)");
        if (n_users == 0) throw ConfigError("users.n_users must be positive");
        if (n_users > array.size()) throw ConfigError("users.n_users cannot exceed the element count");
        if (!(location_error_m >= 0.0)) throw ConfigError("users.location_error_m must be non-negative");
        if (schemes.empty()) throw ConfigError("schemes must not be empty");
        if (n_drops == 0) throw ConfigError("drops must be positive");
        if (workers == 0) throw ConfigError("workers must be positive");
        noma.validate();
    }
};

}  // namespace ntnsim
