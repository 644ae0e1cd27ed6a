#pragma once

#include <numbers>

namespace ntnsim::constants {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLightKmS = 299792.458;
inline constexpr double kSpeedOfLightMS = 299792458.0;
inline constexpr double kEarthMuKm3S2 = 398600.4418;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kMeanEarthRadiusKm = 6371.0;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace ntnsim::constants

#include <cmath>

namespace ntnsim {

inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin2db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace ntnsim
