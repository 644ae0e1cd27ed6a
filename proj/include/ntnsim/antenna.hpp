#pragma once

// Planar on-board array: steering vectors, element pattern and the fixed
// beam lattice used by the frequency-reuse baselines.

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"

namespace ntnsim {

using cplx = std::complex<double>;

struct ArrayGeometry {
    std::size_t n_rows = 16;
    std::size_t n_cols = 16;
    double element_spacing_wavelengths = 0.5;
    double max_element_gain_dbi = 8.0;
    double pattern_exponent = 2.0;
    /// Element gain never drops more than this below the peak.
    double pattern_floor_db = -30.0;

    std::size_t size() const { return n_rows * n_cols; }

    void validate() const {
        if (n_rows == 0 || n_cols == 0) throw ConfigError("array needs at least one row and column");
        if (!(element_spacing_wavelengths > 0.0))
            throw ConfigError("element spacing must be positive");
        if (!(pattern_exponent >= 0.0)) throw ConfigError("element pattern exponent must be >= 0");
        if (!std::isfinite(max_element_gain_dbi)) throw ConfigError("element gain must be finite");
    }
};

/// Phase-steering vector toward direction cosines (u, v); element (r, c) sits at index r*n_cols + c.
inline Eigen::VectorXcd steering_vector(const ArrayGeometry& array, double u, double v) {
    if (!(u * u + v * v <= 1.0)) throw DomainError("steering direction behind the array plane");
    Eigen::VectorXcd a(static_cast<Eigen::Index>(array.size()));
    const double k = 2.0 * constants::kPi * array.element_spacing_wavelengths;
    for (std::size_t r = 0; r < array.n_rows; ++r) {
        for (std::size_t c = 0; c < array.n_cols; ++c) {
            const double phase = k * (static_cast<double>(r) * u + static_cast<double>(c) * v);
            a(static_cast<Eigen::Index>(r * array.n_cols + c)) = std::polar(1.0, phase);
        }
    }
    return a;
}

/// Cosine-power element pattern in dBi, floored at `pattern_floor_db` below the peak.
inline double element_gain(const ArrayGeometry& array, double off_boresight_deg) {
    if (!(off_boresight_deg >= 0.0 && off_boresight_deg <= 90.0))
        throw DomainError("off-boresight angle must lie in [0, 90] degrees");
    const double floor = array.max_element_gain_dbi + array.pattern_floor_db;
    const double c = std::cos(constants::deg2rad(off_boresight_deg));
    if (c <= 0.0) return floor;
    return std::max(floor, array.max_element_gain_dbi + 10.0 * array.pattern_exponent * std::log10(c));
}

// ---------------------------------------------------------------------------
// Beam lattice

enum class ReuseScheme { kFull, kFR3, kFR4 };

inline int colour_count(ReuseScheme s) {
    switch (s) {
        case ReuseScheme::kFull: return 1;
        case ReuseScheme::kFR3: return 3;
        case ReuseScheme::kFR4: return 4;
    }
    return 1;
}

/// Simultaneous beams identifiable through SSBs: 8 below 6 GHz, 64 at or above.
inline std::size_t ssb_beam_cap(double carrier_hz) { return carrier_hz < 6e9 ? 8 : 64; }

struct Beam {
    int q = 0;  // axial hex coordinates
    int r = 0;
    double u = 0.0;
    double v = 0.0;
    int colour = 0;
};

struct BeamLattice {
    std::vector<Beam> beams;
    int n_colours = 1;
    double spacing_uv = 0.0;

    double bandwidth_share() const { return 1.0 / static_cast<double>(n_colours); }
    std::size_t size() const { return beams.size(); }

    bool adjacent(std::size_t i, std::size_t j) const {
        const int dq = beams[j].q - beams[i].q;
        const int dr = beams[j].r - beams[i].r;
        return (std::abs(dq) + std::abs(dr) + std::abs(dq + dr)) == 2;
    }
};

namespace detail {

inline int hex_ring(int q, int r) { return (std::abs(q) + std::abs(r) + std::abs(q + r)) / 2; }

inline int positive_mod(int a, int m) { return ((a % m) + m) % m; }

inline int hex_colour(int q, int r, ReuseScheme scheme) {
    switch (scheme) {
        case ReuseScheme::kFull: return 0;
        case ReuseScheme::kFR3: return positive_mod(q - r, 3);
        case ReuseScheme::kFR4: return positive_mod(q, 2) + 2 * positive_mod(r, 2);
    }
    return 0;
}

// Hex cells ordered by ring, then counter-clockwise from the +u axis.
inline std::vector<std::array<int, 2>> hex_cells(std::size_t count) {
    static constexpr std::array<std::array<int, 2>, 6> kDirs{
        {{-1, 1}, {-1, 0}, {0, -1}, {1, -1}, {1, 0}, {0, 1}}};
    std::vector<std::array<int, 2>> cells{{0, 0}};
    for (int ring = 1; cells.size() < count; ++ring) {
        int q = ring, r = 0;
        for (const auto& d : kDirs) {
            for (int step = 0; step < ring; ++step) {
                cells.push_back({q, r});
                q += d[0];
                r += d[1];
            }
        }
    }
    cells.resize(count);
    return cells;
}

}  // namespace detail

/// Hexagonal lattice of `n_beams` beam centres filling a cone of the given half angle
/// around nadir, coloured for the requested reuse scheme.
inline BeamLattice generate_beam_lattice(double coverage_half_angle_deg, std::size_t n_beams,
                                         ReuseScheme scheme, double carrier_hz = 20e9) {
    if (n_beams == 0) throw ConfigError("beam lattice needs at least one beam");
    const std::size_t cap = ssb_beam_cap(carrier_hz);
    if (n_beams > cap)
        throw ConfigError("requested " + std::to_string(n_beams) + " beams exceeds the SSB cap of " +
                          std::to_string(cap) + " beams at this carrier");
    if (!(coverage_half_angle_deg > 0.0 && coverage_half_angle_deg < 90.0))
        throw ConfigError("coverage half angle must lie in (0, 90) degrees");

    const auto cells = detail::hex_cells(n_beams);
    const int rings = detail::hex_ring(cells.back()[0], cells.back()[1]);
    const double radius = std::sin(constants::deg2rad(coverage_half_angle_deg));

    BeamLattice lattice;
    lattice.n_colours = colour_count(scheme);
    lattice.spacing_uv = radius / (static_cast<double>(rings) + 0.5);
    const double s = lattice.spacing_uv;
    for (const auto& [q, r] : cells) {
        Beam b;
        b.q = q;
        b.r = r;
        b.u = s * (q + 0.5 * r);
        b.v = s * (std::sqrt(3.0) / 2.0 * r);
        b.colour = detail::hex_colour(q, r, scheme);
        lattice.beams.push_back(b);
    }
    return lattice;
}

inline void write_lattice_csv(const BeamLattice& lattice, std::ostream& os) {
    os << "beam_id,u,v,colour\n";
    os.precision(12);
    for (std::size_t i = 0; i < lattice.beams.size(); ++i) {
        const auto& b = lattice.beams[i];
        os << i << ',' << b.u << ',' << b.v << ',' << b.colour << '\n';
    }
}

}  // namespace ntnsim
