#pragma once

// Full-frequency-reuse precoders (MMSE, ZF, location-based MMSE) with the
// maximum-power-constraint normalisation, the FR3/FR4 fixed-beam baseline,
// and SINR / Shannon-capacity evaluation.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "antenna.hpp"
#include "channel.hpp"
#include "errors.hpp"

namespace ntnsim {

struct PrecodingMatrix {
    Eigen::MatrixXcd entries;  // elements x served users
    double total_power_w = 0.0;
    double per_feed_power_cap_w = 0.0;
    /// Positive scalar that maps the unnormalised matrix onto `entries`.
    double scale = 1.0;

    Eigen::VectorXd feed_power() const { return entries.rowwise().squaredNorm(); }
};

/// Scales `unnormalised` by one positive scalar so the hottest feed radiates exactly
/// total_power / N. Beam directions (and their mutual orthogonality) are untouched.
inline PrecodingMatrix normalize_max_power(Eigen::MatrixXcd unnormalised, double total_power_w) {
    if (!(total_power_w > 0.0)) throw DomainError("total power must be positive");
    const double n = static_cast<double>(unnormalised.rows());
    const double hottest = unnormalised.rowwise().squaredNorm().maxCoeff();
    if (!(hottest > 0.0) || !std::isfinite(hottest))
        throw NumericalError("precoder has no finite radiated power to normalise");
    PrecodingMatrix w;
    w.total_power_w = total_power_w;
    w.per_feed_power_cap_w = total_power_w / n;
    w.scale = 1.0 / std::sqrt(n * hottest / total_power_w);
    w.entries = std::move(unnormalised) * w.scale;
    return w;
}

namespace detail {

inline void check_precoder_input(const ChannelMatrix& h) {
    if (h.users() < 1 || h.elements() < 1) throw ContractError("channel matrix is empty");
    if (h.users() > h.elements())
        throw ContractError("cannot serve " + std::to_string(h.users()) + " users with " +
                            std::to_string(h.elements()) + " radiating elements");
    if (!h.entries.allFinite()) throw ContractError("channel matrix has non-finite entries");
}

// H^H (H H^H + alpha I)^-1
inline Eigen::MatrixXcd regularised_inverse(const Eigen::MatrixXcd& h, double alpha) {
    const Eigen::Index k = h.rows();
    Eigen::MatrixXcd gram = h * h.adjoint();
    if (alpha > 0.0) {
        gram.diagonal().array() += alpha;
        Eigen::LLT<Eigen::MatrixXcd> llt(gram);
        if (llt.info() != Eigen::Success) throw NumericalError("regularised Gram matrix is not positive definite");
        return llt.solve(h).adjoint();
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(gram);
    lu.setThreshold(1e-12);
    if (lu.rank() < k)
        throw NumericalError("channel Gram matrix is singular (rank " + std::to_string(lu.rank()) +
                             " < " + std::to_string(k) + "); use a positive regulariser");
    return lu.solve(h).adjoint();
}

}  // namespace detail

/// Regularised ZF with alpha = K * noise / P, normalised by the maximum power rule.
inline PrecodingMatrix mmse_precoder(const ChannelMatrix& h_est, double noise_power_w,
                                     double total_power_w) {
    detail::check_precoder_input(h_est);
    if (!(noise_power_w >= 0.0)) throw DomainError("noise power must be non-negative");
    const double alpha = static_cast<double>(h_est.users()) * noise_power_w / total_power_w;
    return normalize_max_power(detail::regularised_inverse(h_est.entries, alpha), total_power_w);
}

inline PrecodingMatrix zf_precoder(const ChannelMatrix& h_est, double total_power_w) {
    detail::check_precoder_input(h_est);
    return normalize_max_power(detail::regularised_inverse(h_est.entries, 0.0), total_power_w);
}

/// MMSE built on a channel reconstructed from reported locations.
inline PrecodingMatrix lb_mmse_precoder(const ChannelMatrix& h_inferred, double noise_power_w,
                                        double total_power_w) {
    if (h_inferred.kind != ChannelKind::kLocationInferred)
        throw ContractError("LB-MMSE requires a location-inferred channel");
    return mmse_precoder(h_inferred, noise_power_w, total_power_w);
}

/// SINR_u = |h_u w_u|^2 / (sum_{v != u} |h_u w_v|^2 + noise_u).
inline Eigen::VectorXd compute_sinr(const ChannelMatrix& h_true, const PrecodingMatrix& w) {
    if (h_true.elements() != w.entries.rows() || h_true.users() != w.entries.cols())
        throw ContractError("channel and precoder dimensions disagree");
    const Eigen::MatrixXd power = (h_true.entries * w.entries).cwiseAbs2();
    Eigen::VectorXd sinr(h_true.users());
    for (Eigen::Index u = 0; u < h_true.users(); ++u) {
        const double signal = power(u, u);
        const double interference = power.row(u).sum() - signal;
        sinr(u) = signal / (interference + h_true.noise_power_w(u));
    }
    return sinr;
}

// ---------------------------------------------------------------------------
// Capacity

struct LinkResult {
    Eigen::VectorXd sinr_linear;
    /// Effective time-frequency resource: band share times scheduling fraction.
    Eigen::VectorXd allocated_bandwidth_hz;
    Eigen::VectorXd spectral_efficiency_bps_hz;
    Eigen::VectorXd rate_bps;
    double system_capacity_bps = 0.0;
    double mean_spectral_efficiency = 0.0;

    double mean_sinr_db() const {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < sinr_linear.size(); ++i) acc += 10.0 * std::log10(sinr_linear(i));
        return acc / static_cast<double>(sinr_linear.size());
    }
};

/// Shannon mapping rate = B log2(1 + SINR); `se_cap` optionally clips spectral efficiency.
inline LinkResult capacity(const Eigen::VectorXd& sinr, const Eigen::VectorXd& bandwidth_hz,
                           std::optional<double> se_cap = std::nullopt) {
    if (sinr.size() != bandwidth_hz.size()) throw ContractError("one bandwidth per user is required");
    if (sinr.size() == 0) throw ContractError("no users to evaluate");
    LinkResult r;
    r.sinr_linear = sinr;
    r.allocated_bandwidth_hz = bandwidth_hz;
    r.spectral_efficiency_bps_hz.resize(sinr.size());
    r.rate_bps.resize(sinr.size());
    for (Eigen::Index u = 0; u < sinr.size(); ++u) {
        if (!(sinr(u) >= 0.0)) throw DomainError("SINR must be non-negative");
        if (!(bandwidth_hz(u) > 0.0)) throw DomainError("bandwidth must be positive");
        double se = std::log2(1.0 + sinr(u));
        if (se_cap) se = std::min(se, *se_cap);
        r.spectral_efficiency_bps_hz(u) = se;
        r.rate_bps(u) = bandwidth_hz(u) * se;
    }
    r.system_capacity_bps = r.rate_bps.sum();
    r.mean_spectral_efficiency = r.spectral_efficiency_bps_hz.mean();
    return r;
}

inline LinkResult capacity(const Eigen::VectorXd& sinr, double bandwidth_hz,
                           std::optional<double> se_cap = std::nullopt) {
    return capacity(sinr, Eigen::VectorXd::Constant(sinr.size(), bandwidth_hz), se_cap);
}

// ---------------------------------------------------------------------------
// Frequency-reuse baseline

struct FrOutcome {
    LinkResult link;
    std::vector<std::size_t> beam_of_user;
    std::vector<std::size_t> users_per_beam;
};

/// Fixed lattice beams, each radiating total_power / n_beams through a uniform
/// steering-vector beamformer on its colour's sub-band. Users camp on their
/// strongest beam and are served round-robin within it; only co-colour active
/// beams interfere.
inline FrOutcome fr_transmit(const ChannelMatrix& h_true, const BeamLattice& lattice,
                             const ArrayGeometry& array, double total_power_w) {
    if (h_true.users() < 1) throw ContractError("FR transmission needs at least one user");
    if (lattice.size() == 0) throw ContractError("beam lattice is empty");
    if (h_true.elements() != static_cast<Eigen::Index>(array.size()))
        throw ContractError("channel columns do not match the array size");
    const auto n_beams = static_cast<Eigen::Index>(lattice.size());
    const double n = static_cast<double>(array.size());
    const double beam_amplitude = std::sqrt(total_power_w / static_cast<double>(n_beams) / n);

    Eigen::MatrixXcd beams(h_true.elements(), n_beams);
    for (Eigen::Index b = 0; b < n_beams; ++b) {
        const auto& beam = lattice.beams[static_cast<std::size_t>(b)];
        beams.col(b) = beam_amplitude * steering_vector(array, beam.u, beam.v);
    }
    const Eigen::MatrixXd power = (h_true.entries * beams).cwiseAbs2();

    FrOutcome out;
    out.beam_of_user.resize(static_cast<std::size_t>(h_true.users()));
    out.users_per_beam.assign(lattice.size(), 0);
    for (Eigen::Index u = 0; u < h_true.users(); ++u) {
        Eigen::Index best = 0;
        for (Eigen::Index b = 1; b < n_beams; ++b)
            if (power(u, b) > power(u, best)) best = b;  // strict: ties keep the lower index
        out.beam_of_user[static_cast<std::size_t>(u)] = static_cast<std::size_t>(best);
        ++out.users_per_beam[static_cast<std::size_t>(best)];
    }

    const double share = lattice.bandwidth_share();
    Eigen::VectorXd sinr(h_true.users());
    Eigen::VectorXd bandwidth(h_true.users());
    for (Eigen::Index u = 0; u < h_true.users(); ++u) {
        const std::size_t own = out.beam_of_user[static_cast<std::size_t>(u)];
        const int colour = lattice.beams[own].colour;
        double interference = 0.0;
        for (std::size_t b = 0; b < lattice.size(); ++b) {
            if (b == own || out.users_per_beam[b] == 0 || lattice.beams[b].colour != colour) continue;
            interference += power(u, static_cast<Eigen::Index>(b));
        }
        sinr(u) = power(u, static_cast<Eigen::Index>(own)) /
                  (interference + h_true.noise_power_w(u) * share);
        bandwidth(u) = h_true.bandwidth_hz * share / static_cast<double>(out.users_per_beam[own]);
    }
    out.link = capacity(sinr, bandwidth);
    return out;
}

}  // namespace ntnsim
