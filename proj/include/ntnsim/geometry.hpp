#pragma once

// Spherical-Earth satellite/terminal geometry for a circular LEO orbit.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <string>

#include "constants.hpp"
#include "errors.hpp"

namespace ntnsim {

struct GeometryContext {
    double earth_radius_km = constants::kMeanEarthRadiusKm;
    double altitude_km = 600.0;
    double user_min_elevation_deg = 30.0;
    double gateway_min_elevation_deg = 10.0;

    void validate() const {
        if (!(earth_radius_km > 0.0) || !std::isfinite(earth_radius_km))
            throw DomainError("earth_radius_km must be positive");
        if (!(altitude_km > 0.0) || !std::isfinite(altitude_km))
            throw DomainError("altitude_km must be positive");
        auto check = [](double e, const char* name) {
            if (!(e > 0.0 && e <= 90.0))
                throw DomainError(std::string(name) + " must lie in (0, 90] degrees");
        };
        check(user_min_elevation_deg, "user_min_elevation_deg");
        check(gateway_min_elevation_deg, "gateway_min_elevation_deg");
    }
};

struct LinkGeometry {
    double slant_range_km = 0.0;
    double elevation_deg = 0.0;
    double one_way_delay_ms = 0.0;
};

/// Distance from a terminal at elevation `elevation_deg` to the satellite.
inline double slant_range(const GeometryContext& ctx, double elevation_deg) {
    ctx.validate();
    if (!(elevation_deg > 0.0 && elevation_deg <= 90.0))
        throw DomainError("elevation must lie in (0, 90] degrees, got " + std::to_string(elevation_deg));
    if (elevation_deg == 90.0) return ctx.altitude_km;
    const double r = ctx.earth_radius_km;
    const double h = ctx.altitude_km;
    const double s = std::sin(constants::deg2rad(elevation_deg));
    return std::sqrt(r * r * s * s + 2.0 * r * h + h * h) - r * s;
}

inline double propagation_delay(double range_km) {
    if (!(range_km >= 0.0)) throw DomainError("propagation range must be non-negative");
    return range_km / constants::kSpeedOfLightKmS * 1e3;
}

inline LinkGeometry link_geometry(const GeometryContext& ctx, double elevation_deg) {
    const double d = slant_range(ctx, elevation_deg);
    return {d, elevation_deg, propagation_delay(d)};
}

/// Staleness of ancillary information: user report up to the satellite, down the feeder link
/// to the gNB, and the precoded signal back up the feeder link.
inline double misalignment_interval(const GeometryContext& ctx) {
    const double user_leg = propagation_delay(slant_range(ctx, ctx.user_min_elevation_deg));
    const double feeder_leg = propagation_delay(slant_range(ctx, ctx.gateway_min_elevation_deg));
    return user_leg + 2.0 * feeder_leg;
}

inline double orbital_speed(const GeometryContext& ctx) {
    ctx.validate();
    return std::sqrt(constants::kEarthMuKm3S2 / (ctx.earth_radius_km + ctx.altitude_km));
}

/// Worst-case (fully radial) Doppler shift. Reported only; never applied to channels.
inline double max_doppler(const GeometryContext& ctx, double carrier_hz) {
    if (!(carrier_hz >= 0.0)) throw DomainError("carrier frequency must be non-negative");
    return orbital_speed(ctx) / constants::kSpeedOfLightKmS * carrier_hz;
}

// ---------------------------------------------------------------------------
// Earth-centred frame used to place terminals and move the satellite.
//
// The orbit lies in the x-z plane; at t = 0 the satellite is above +z. The
// on-board array is nadir pointing: its boresight is -position, its first
// in-plane axis is the along-track direction and its second is +y.

struct SatelliteState {
    Eigen::Vector3d position_km;
    Eigen::Vector3d along_track;
    Eigen::Vector3d cross_track;
    Eigen::Vector3d boresight;
};

inline SatelliteState satellite_state(const GeometryContext& ctx, double time_s) {
    ctx.validate();
    const double orbit_radius = ctx.earth_radius_km + ctx.altitude_km;
    const double phase = orbital_speed(ctx) * time_s / orbit_radius;
    SatelliteState s;
    s.position_km = orbit_radius * Eigen::Vector3d(std::sin(phase), 0.0, std::cos(phase));
    s.along_track = Eigen::Vector3d(std::cos(phase), 0.0, -std::sin(phase));
    s.cross_track = Eigen::Vector3d::UnitY();
    s.boresight = -s.position_km.normalized();
    return s;
}

/// Direction cosines (u, v) of a ground point in the array frame, plus slant range.
struct ArrayDirection {
    double u = 0.0;
    double v = 0.0;
    double range_km = 0.0;
    double off_boresight_deg = 0.0;
};

inline ArrayDirection direction_to(const SatelliteState& sat, const Eigen::Vector3d& ground_km) {
    const Eigen::Vector3d los = ground_km - sat.position_km;
    const double range = los.norm();
    const Eigen::Vector3d dir = los / range;
    const double w = dir.dot(sat.boresight);
    if (!(w > 0.0)) throw DomainError("ground point lies behind the array plane");
    return {dir.dot(sat.along_track), dir.dot(sat.cross_track), range,
            constants::rad2deg(std::acos(std::min(1.0, w)))};
}

/// Elevation of the satellite as seen from a point on the Earth's surface.
inline double elevation_of(const SatelliteState& sat, const Eigen::Vector3d& ground_km) {
    const Eigen::Vector3d up = ground_km.normalized();
    const Eigen::Vector3d los = (sat.position_km - ground_km).normalized();
    return constants::rad2deg(std::asin(std::clamp(up.dot(los), -1.0, 1.0)));
}

/// Intersects the ray leaving the satellite along (u, v) with the Earth's surface.
inline Eigen::Vector3d ground_point(const GeometryContext& ctx, const SatelliteState& sat, double u,
                                    double v) {
    const double uv2 = u * u + v * v;
    if (!(uv2 < 1.0)) throw DomainError("direction cosines outside the visible hemisphere");
    const Eigen::Vector3d dir =
        u * sat.along_track + v * sat.cross_track + std::sqrt(1.0 - uv2) * sat.boresight;
    // |p + t d|^2 = R^2, nearest positive root
    const double b = sat.position_km.dot(dir);
    const double c = sat.position_km.squaredNorm() - ctx.earth_radius_km * ctx.earth_radius_km;
    const double disc = b * b - c;
    if (disc < 0.0) throw DomainError("direction misses the Earth");
    const double t = -b - std::sqrt(disc);
    return sat.position_km + t * dir;
}

}  // namespace ntnsim
