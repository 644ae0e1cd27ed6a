#pragma once

// One Monte-Carlo drop of the single-satellite downlink: users are dropped,
// ancillary information is gathered at t, and every configured scheme is
// evaluated against the channel at t + dt.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "antenna.hpp"
#include "channel.hpp"
#include "geometry.hpp"
#include "precoding.hpp"
#include "random.hpp"
#include "scenario.hpp"

namespace ntnsim {

struct ResultRecord {
    std::size_t drop_id = 0;
    Scheme scheme = Scheme::kFR3;
    ChannelMode channel_mode = ChannelMode::kTgpp;
    double system_capacity_bps = 0.0;
    double mean_sinr_db = 0.0;
    double mean_spectral_efficiency = 0.0;
    std::uint64_t seed = 0;
    /// False when the drop aborted; numeric fields are NaN then.
    bool ok = true;
};

/// Uniform sample inside the hexagonal cell of `beam` (flat sides facing the six neighbours).
template <class Rng>
std::array<double, 2> sample_in_cell(const BeamLattice& lattice, const Beam& beam, Rng& rng) {
    const double s = lattice.spacing_uv;
    const double half = s / std::sqrt(3.0);  // centre-to-vertex
    std::uniform_real_distribution<double> box(-half, half);
    static const std::array<std::array<double, 2>, 3> kNormals{
        {{1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}, {-0.5, std::sqrt(3.0) / 2.0}}};
    while (true) {
        const double x = box(rng);
        const double y = box(rng);
        bool inside = true;
        for (const auto& n : kNormals) inside = inside && std::abs(x * n[0] + y * n[1]) <= s / 2.0;
        if (inside) return {beam.u + x, beam.v + y};
    }
}

/// Drops users uniformly over the footprint of the configured beam lattice.
inline TerminalPopulation drop_users(const ScenarioConfig& cfg, std::uint64_t seed) {
    const BeamLattice lattice =
        generate_beam_lattice(cfg.coverage_half_angle_deg, cfg.n_beams, ReuseScheme::kFull, cfg.carrier_hz);
    const SatelliteState sat = satellite_state(cfg.geometry, 0.0);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, lattice.size() - 1);
    TerminalPopulation users;
    users.min_elevation_deg = cfg.geometry.user_min_elevation_deg;
    users.terminals.reserve(cfg.n_users);
    for (std::size_t i = 0; i < cfg.n_users; ++i) {
        const auto& beam = lattice.beams[pick(rng)];
        const auto [u, v] = sample_in_cell(lattice, beam, rng);
        Terminal t;
        t.position_km = ground_point(cfg.geometry, sat, u, v);
        t.reported_position_km = t.position_km;
        t.rx_gain_dbi = cfg.rx_gain_dbi;
        t.g_over_t_dbk = cfg.g_over_t_dbk;
        users.terminals.push_back(t);
    }
    return users;
}

inline std::uint64_t drop_seed(std::uint64_t master_seed, std::size_t drop_id) {
    return derive_seed(master_seed, {static_cast<std::uint64_t>(drop_id)});
}

/// Channels and ancillary information shared by every scheme within a drop.
struct DropState {
    TerminalPopulation users;
    SatelliteState sat_estimation;
    SatelliteState sat_transmission;
    ChannelMatrix at_estimation;
    ChannelMatrix at_transmission;
    double misalignment_ms = 0.0;
};

inline DropState prepare_drop(const ScenarioConfig& cfg, std::uint64_t seed) {
    DropState d;
    d.users = drop_users(cfg, derive_seed(seed, {streams::kUsers}));
    report_locations(d.users, cfg.geometry, cfg.location_error_m, derive_seed(seed, {streams::kLocation}));
    d.misalignment_ms = cfg.effective_misalignment_ms();
    d.sat_estimation = satellite_state(cfg.geometry, 0.0);
    d.sat_transmission = satellite_state(cfg.geometry, d.misalignment_ms * 1e-3);
    d.at_estimation = build_clear_sky(d.users, cfg.array, d.sat_estimation, cfg.carrier_hz, cfg.bandwidth_hz);
    d.at_transmission =
        build_clear_sky(d.users, cfg.array, d.sat_transmission, cfg.carrier_hz, cfg.bandwidth_hz);
    if (cfg.channel_mode == ChannelMode::kTgpp) {
        const auto n = d.users.size();
        const std::uint64_t slow = derive_seed(seed, {streams::kSlowFading});
        const std::uint64_t fast_est = derive_seed(seed, {streams::kScintEstimate});
        // With no misalignment the transmission sees the very fade that was estimated.
        const std::uint64_t fast_tx = cfg.impairments.scintillation_redraw && d.misalignment_ms > 0.0
                                          ? derive_seed(seed, {streams::kScintTransmit})
                                          : fast_est;
        d.at_estimation = apply_3gpp_impairments(std::move(d.at_estimation),
                                                 draw_impairments(cfg.impairments, n, slow, fast_est).total_db());
        d.at_transmission = apply_3gpp_impairments(std::move(d.at_transmission),
                                                   draw_impairments(cfg.impairments, n, slow, fast_tx).total_db());
    }
    return d;
}

inline LinkResult evaluate_scheme(const ScenarioConfig& cfg, const DropState& d, Scheme scheme,
                                  std::uint64_t seed) {
    const double power = cfg.power_w();
    const double noise = d.at_transmission.noise_power_w.mean();
    switch (scheme) {
        case Scheme::kFR3:
        case Scheme::kFR4: {
            const auto reuse = scheme == Scheme::kFR3 ? ReuseScheme::kFR3 : ReuseScheme::kFR4;
            const BeamLattice lattice =
                generate_beam_lattice(cfg.coverage_half_angle_deg, cfg.n_beams, reuse, cfg.carrier_hz);
            return fr_transmit(d.at_transmission, lattice, cfg.array, power).link;
        }
        case Scheme::kMMSE:
        case Scheme::kZF: {
            const ChannelMatrix est = estimate_csi(d.at_estimation, d.at_transmission, cfg.estimation_noise_db,
                                                   derive_seed(seed, {streams::kEstimation}));
            const PrecodingMatrix w =
                scheme == Scheme::kMMSE ? mmse_precoder(est, noise, power) : zf_precoder(est, power);
            return capacity(compute_sinr(d.at_transmission, w), cfg.bandwidth_hz);
        }
        case Scheme::kLbMmse: {
            const ChannelMatrix inferred = infer_from_location(d.users, cfg.array, d.sat_transmission,
                                                               cfg.carrier_hz, cfg.bandwidth_hz);
            const PrecodingMatrix w = lb_mmse_precoder(inferred, noise, power);
            return capacity(compute_sinr(d.at_transmission, w), cfg.bandwidth_hz);
        }
    }
    throw ContractError("unknown scheme");
}

/// Runs one drop; any module failure yields flagged records instead of propagating.
inline std::vector<ResultRecord> simulate_drop(const ScenarioConfig& cfg, std::size_t drop_id) {
    const std::uint64_t seed = drop_seed(cfg.master_seed, drop_id);
    std::vector<ResultRecord> out;
    out.reserve(cfg.schemes.size());
    auto flagged = [&](Scheme s) {
        ResultRecord r;
        r.drop_id = drop_id;
        r.scheme = s;
        r.channel_mode = cfg.channel_mode;
        r.seed = seed;
        r.ok = false;
        r.system_capacity_bps = r.mean_sinr_db = r.mean_spectral_efficiency =
            std::numeric_limits<double>::quiet_NaN();
        return r;
    };
    std::optional<DropState> state;
    try {
        state = prepare_drop(cfg, seed);
    } catch (const std::exception&) {
        for (Scheme s : cfg.schemes) out.push_back(flagged(s));
        return out;
    }
    for (Scheme s : cfg.schemes) {
        try {
            const LinkResult link = evaluate_scheme(cfg, *state, s, seed);
            ResultRecord r;
            r.drop_id = drop_id;
            r.scheme = s;
            r.channel_mode = cfg.channel_mode;
            r.system_capacity_bps = link.system_capacity_bps;
            r.mean_sinr_db = link.mean_sinr_db();
            r.mean_spectral_efficiency = link.mean_spectral_efficiency;
            r.seed = seed;
            out.push_back(r);
        } catch (const std::exception&) {
            out.push_back(flagged(s));
        }
    }
    return out;
}

}  // namespace ntnsim
