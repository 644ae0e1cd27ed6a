#pragma once

// User x element channel synthesis: clear-sky link budget, stochastic NTN
// losses, stale CSI and geometric reconstruction from reported locations.

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include "antenna.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "random.hpp"

namespace ntnsim {

struct Terminal {
    Eigen::Vector3d position_km = Eigen::Vector3d::Zero();
    /// Position the terminal reports; equals `position_km` unless a location error is applied.
    Eigen::Vector3d reported_position_km = Eigen::Vector3d::Zero();
    double rx_gain_dbi = 39.7;
    double g_over_t_dbk = 15.9;
};

struct TerminalPopulation {
    std::vector<Terminal> terminals;
    double min_elevation_deg = 30.0;

    std::size_t size() const { return terminals.size(); }
};

/// Thermal noise k*T*B with T derived from the terminal's antenna gain and G/T.
inline double noise_power_w(const Terminal& t, double bandwidth_hz) {
    const double t_sys = db2lin(t.rx_gain_dbi - t.g_over_t_dbk);
    return constants::kBoltzmann * t_sys * bandwidth_hz;
}

enum class ChannelKind { kTrue, kCsiEstimate, kLocationInferred };

struct ChannelMatrix {
    Eigen::MatrixXcd entries;  // users x elements
    ChannelKind kind = ChannelKind::kTrue;
    double carrier_hz = 0.0;
    double bandwidth_hz = 0.0;
    Eigen::VectorXd noise_power_w;

    Eigen::Index users() const { return entries.rows(); }
    Eigen::Index elements() const { return entries.cols(); }
};

inline double fspl_db(double range_m, double carrier_hz) {
    const double lambda = constants::kSpeedOfLightMS / carrier_hz;
    return 20.0 * std::log10(4.0 * constants::kPi * range_m / lambda);
}

namespace detail {

inline Eigen::RowVectorXcd geometric_row(const Eigen::Vector3d& ground_km, const Terminal& t,
                                         const ArrayGeometry& array, const SatelliteState& sat,
                                         double carrier_hz) {
    const ArrayDirection dir = direction_to(sat, ground_km);
    const double range_m = dir.range_km * 1e3;
    const double lambda = constants::kSpeedOfLightMS / carrier_hz;
    const double gain_db = t.rx_gain_dbi + element_gain(array, dir.off_boresight_deg) -
                           fspl_db(range_m, carrier_hz);
    const double amplitude = std::sqrt(db2lin(gain_db));
    // Reduce the carrier phase before scaling; range/lambda is ~1e8 cycles.
    const double cycles = std::fmod(range_m / lambda, 1.0);
    const cplx carrier_phase = std::polar(amplitude, -2.0 * constants::kPi * cycles);
    return carrier_phase * steering_vector(array, dir.u, dir.v).conjugate().transpose();
}

inline void check_elevations(const TerminalPopulation& users, const SatelliteState& sat,
                             bool reported) {
    for (std::size_t i = 0; i < users.size(); ++i) {
        const auto& t = users.terminals[i];
        const double e = elevation_of(sat, reported ? t.reported_position_km : t.position_km);
        if (e < users.min_elevation_deg - 1e-9)
            throw DomainError("user " + std::to_string(i) + " at elevation " + std::to_string(e) +
                              " deg is below the minimum of " +
                              std::to_string(users.min_elevation_deg) + " deg");
    }
}

inline ChannelMatrix geometric_channel(const TerminalPopulation& users, const ArrayGeometry& array,
                                       const SatelliteState& sat, double carrier_hz,
                                       double bandwidth_hz, bool reported, ChannelKind kind) {
    if (users.size() == 0) throw ContractError("terminal population is empty");
    if (!(carrier_hz > 0.0)) throw DomainError("carrier frequency must be positive");
    array.validate();
    check_elevations(users, sat, reported);
    ChannelMatrix h;
    h.kind = kind;
    h.carrier_hz = carrier_hz;
    h.bandwidth_hz = bandwidth_hz;
    h.entries.resize(static_cast<Eigen::Index>(users.size()), static_cast<Eigen::Index>(array.size()));
    h.noise_power_w.resize(static_cast<Eigen::Index>(users.size()));
    for (std::size_t i = 0; i < users.size(); ++i) {
        const auto& t = users.terminals[i];
        const auto row = static_cast<Eigen::Index>(i);
        h.entries.row(row) =
            geometric_row(reported ? t.reported_position_km : t.position_km, t, array, sat, carrier_hz);
        h.noise_power_w(row) = noise_power_w(t, bandwidth_hz);
    }
    return h;
}

}  // namespace detail

/// Line-of-sight channel from each terminal's true position to the satellite at `sat`.
inline ChannelMatrix build_clear_sky(const TerminalPopulation& users, const ArrayGeometry& array,
                                     const SatelliteState& sat, double carrier_hz,
                                     double bandwidth_hz) {
    return detail::geometric_channel(users, array, sat, carrier_hz, bandwidth_hz, false,
                                     ChannelKind::kTrue);
}

// ---------------------------------------------------------------------------
// Stochastic losses

struct ImpairmentProfile {
    bool atmospheric_enabled = true;
    double atmospheric_loss_db = 0.5;
    bool scintillation_enabled = true;
    double scintillation_sigma_db = 0.3;
    /// Off: the losses seen at transmission are the ones that were estimated, so only the
    /// satellite displacement separates the two channels. On: scintillation is redrawn.
    bool scintillation_redraw = false;
    bool shadowing_enabled = true;
    double shadow_sigma_db = 2.0;

    void validate() const {
        if (!(atmospheric_loss_db >= 0.0) || !(scintillation_sigma_db >= 0.0) || !(shadow_sigma_db >= 0.0))
            throw ConfigError("impairment levels must be non-negative");
    }

    static ImpairmentProfile disabled() {
        ImpairmentProfile p;
        p.atmospheric_enabled = p.scintillation_enabled = p.shadowing_enabled = false;
        return p;
    }
};

/// Per-user loss components in dB.
struct ImpairmentDraw {
    std::vector<double> atmospheric_db;
    std::vector<double> scintillation_db;
    std::vector<double> shadow_db;

    std::vector<double> total_db() const {
        std::vector<double> out(atmospheric_db.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = atmospheric_db[i] + scintillation_db[i] + shadow_db[i];
        return out;
    }
};

namespace detail {

// Folded normal: a log-normal fade expressed in dB and restricted to losses.
inline std::vector<double> folded_normal_db(std::size_t n, double sigma, std::uint64_t seed) {
    std::vector<double> out(n, 0.0);
    if (sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sigma);
    for (auto& x : out) x = std::abs(dist(rng));
    return out;
}

}  // namespace detail

/// Draws per-user losses. Shadowing comes from `slow_seed` (persists over a drop);
/// scintillation from `fast_seed` (decorrelates across the misalignment interval).
inline ImpairmentDraw draw_impairments(const ImpairmentProfile& profile, std::size_t n_users,
                                       std::uint64_t slow_seed, std::uint64_t fast_seed) {
    profile.validate();
    ImpairmentDraw d;
    d.atmospheric_db.assign(n_users, profile.atmospheric_enabled ? profile.atmospheric_loss_db : 0.0);
    d.scintillation_db = profile.scintillation_enabled
                             ? detail::folded_normal_db(n_users, profile.scintillation_sigma_db, fast_seed)
                             : std::vector<double>(n_users, 0.0);
    d.shadow_db = profile.shadowing_enabled
                      ? detail::folded_normal_db(n_users, profile.shadow_sigma_db, slow_seed)
                      : std::vector<double>(n_users, 0.0);
    return d;
}

inline ChannelMatrix apply_3gpp_impairments(ChannelMatrix h, const std::vector<double>& loss_db) {
    if (static_cast<Eigen::Index>(loss_db.size()) != h.users())
        throw ContractError("one loss value per user row is required");
    for (Eigen::Index u = 0; u < h.users(); ++u)
        h.entries.row(u) *= std::pow(10.0, -loss_db[static_cast<std::size_t>(u)] / 20.0);
    return h;
}

inline ChannelMatrix apply_3gpp_impairments(ChannelMatrix h, const ImpairmentProfile& profile,
                                            std::uint64_t seed) {
    const auto draw = draw_impairments(profile, static_cast<std::size_t>(h.users()), seed,
                                       splitmix64(seed));
    return apply_3gpp_impairments(std::move(h), draw.total_db());
}

// ---------------------------------------------------------------------------
// Ancillary information

/// CSI measured at estimation time, optionally with additive estimation noise whose power
/// per entry is `estimation_noise_db` relative to that entry's channel power. The precoder
/// built from it is evaluated against `at_transmission`.
inline ChannelMatrix estimate_csi(const ChannelMatrix& at_estimation,
                                  const ChannelMatrix& at_transmission,
                                  std::optional<double> estimation_noise_db = std::nullopt,
                                  std::uint64_t seed = 0) {
    if (at_estimation.users() != at_transmission.users() ||
        at_estimation.elements() != at_transmission.elements())
        throw ContractError("CSI estimate and transmission channel dimensions differ");
    ChannelMatrix est = at_estimation;
    est.kind = ChannelKind::kCsiEstimate;
    if (estimation_noise_db) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> dist(0.0, 1.0);
        const double rel = std::sqrt(db2lin(*estimation_noise_db) / 2.0);
        for (Eigen::Index u = 0; u < est.users(); ++u) {
            for (Eigen::Index n = 0; n < est.elements(); ++n) {
                const double scale = std::abs(at_estimation.entries(u, n)) * rel;
                const double re = dist(rng);
                const double im = dist(rng);
                est.entries(u, n) += scale * cplx(re, im);
            }
        }
    }
    return est;
}

/// Perturbs each terminal's reported position by a horizontal Gaussian error
/// (per-axis standard deviation `error_m`), keeping it on the Earth's surface.
inline void report_locations(TerminalPopulation& users, const GeometryContext& ctx, double error_m,
                             std::uint64_t seed) {
    if (!(error_m >= 0.0)) throw ConfigError("location error must be non-negative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (auto& t : users.terminals) {
        t.reported_position_km = t.position_km;
        if (error_m == 0.0) continue;
        const Eigen::Vector3d up = t.position_km.normalized();
        Eigen::Vector3d east = Eigen::Vector3d::UnitZ().cross(up);
        if (east.norm() < 1e-12) east = Eigen::Vector3d::UnitX();
        east.normalize();
        const Eigen::Vector3d north = up.cross(east);
        const double de = dist(rng) * error_m * 1e-3;
        const double dn = dist(rng) * error_m * 1e-3;
        t.reported_position_km =
            (t.position_km + de * east + dn * north).normalized() * ctx.earth_radius_km;
    }
}

/// Clear-sky reconstruction from reported positions and the predicted satellite state at
/// transmission time. Carries no stochastic loss terms.
inline ChannelMatrix infer_from_location(const TerminalPopulation& users, const ArrayGeometry& array,
                                         const SatelliteState& predicted_sat, double carrier_hz,
                                         double bandwidth_hz) {
    return detail::geometric_channel(users, array, predicted_sat, carrier_hz, bandwidth_hz, true,
                                     ChannelKind::kLocationInferred);
}

inline void write_channel_csv(const ChannelMatrix& h, std::ostream& os) {
    os << "user,element,re,im\n";
    os.precision(17);
    for (Eigen::Index u = 0; u < h.users(); ++u)
        for (Eigen::Index n = 0; n < h.elements(); ++n)
            os << u << ',' << n << ',' << h.entries(u, n).real() << ',' << h.entries(u, n).imag() << '\n';
}

}  // namespace ntnsim
