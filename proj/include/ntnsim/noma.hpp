#pragma once

// UAV-assisted uplink NOMA: UE grouping with k-means (elbow + Beale F-test
// for the group count), proportional subcarrier allocation, and energy-
// efficiency maximising power allocation via Dinkelbach's method. A greedy
// subcarrier-grabbing scheme without fairness serves as the baseline.

#include <Eigen/Core>
#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "random.hpp"
#include "scenario.hpp"

namespace ntnsim::noma {

// ---------------------------------------------------------------------------
// Scenario

struct UplinkScenario {
    NomaConfig config;
    Eigen::VectorXd distance_m;     // UE to UAV, 3-D
    Eigen::MatrixXd gain;           // UEs x subcarriers, linear power gain
    double noise_per_subcarrier_w = 0.0;
    double data_bits_per_ue = 0.0;

    std::size_t n_ues() const { return static_cast<std::size_t>(gain.rows()); }
    std::size_t n_subcarriers() const { return static_cast<std::size_t>(gain.cols()); }
    double subcarrier_bandwidth_hz() const {
        return config.bandwidth_hz / static_cast<double>(config.n_subcarriers);
    }
    double required_rate_bps() const { return data_bits_per_ue / config.frame_s; }
};

/// Log-distance path loss referenced to free space at 1 m.
inline double pathloss_db(const NomaConfig& cfg, double distance_m) {
    const double lambda = constants::kSpeedOfLightMS / cfg.carrier_hz;
    const double reference = 20.0 * std::log10(4.0 * constants::kPi / lambda);
    return reference + 10.0 * cfg.pathloss_exponent * std::log10(std::max(distance_m, 1.0));
}

/// UEs uniform over a disc below the UAV; per-subcarrier Rayleigh fading on top of path loss.
inline UplinkScenario make_uplink_scenario(const NomaConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    UplinkScenario s;
    s.config = cfg;
    s.data_bits_per_ue = cfg.data_sizes_bits.front();
    const auto n = static_cast<Eigen::Index>(cfg.n_ues);
    const auto m = static_cast<Eigen::Index>(cfg.n_subcarriers);
    s.distance_m.resize(n);
    s.gain.resize(n, m);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> fading(1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = cfg.cell_radius_m * std::sqrt(unit(rng));
        s.distance_m(i) = std::hypot(r, cfg.uav_altitude_m);
        const double large_scale = std::pow(10.0, -pathloss_db(cfg, s.distance_m(i)) / 10.0);
        for (Eigen::Index k = 0; k < m; ++k) s.gain(i, k) = large_scale * fading(rng);
    }
    s.noise_per_subcarrier_w =
        std::pow(10.0, (cfg.noise_psd_dbm_hz - 30.0) / 10.0) * s.subcarrier_bandwidth_hz();
    return s;
}

/// Clustering features: mean channel gain (dB) and UE-UAV distance, each z-scored.
inline Eigen::MatrixXd clustering_features(const UplinkScenario& s) {
    Eigen::MatrixXd f(s.gain.rows(), 2);
    for (Eigen::Index i = 0; i < s.gain.rows(); ++i) {
        f(i, 0) = 10.0 * std::log10(s.gain.row(i).mean());
        f(i, 1) = s.distance_m(i);
    }
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
        const double mean = f.col(c).mean();
        const double sd = std::sqrt((f.col(c).array() - mean).square().mean());
        f.col(c).array() -= mean;
        if (sd > 0.0) f.col(c) /= sd;
    }
    return f;
}

// ---------------------------------------------------------------------------
// k-means

struct Clustering {
    std::vector<std::size_t> labels;
    Eigen::MatrixXd centroids;  // k x dims
    double sse = 0.0;
    std::size_t iterations = 0;

    std::size_t k() const { return static_cast<std::size_t>(centroids.rows()); }
};

namespace detail {

inline std::size_t nearest(const Eigen::MatrixXd& centroids, const Eigen::RowVectorXd& x, double& dist2) {
    std::size_t best = 0;
    dist2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
        const double d = (centroids.row(c) - x).squaredNorm();
        if (d < dist2) {
            dist2 = d;
            best = static_cast<std::size_t>(c);
        }
    }
    return best;
}

inline Clustering lloyd(const Eigen::MatrixXd& x, std::size_t k, std::mt19937_64& rng) {
    const auto n = static_cast<std::size_t>(x.rows());
    Clustering out;
    out.centroids.resize(static_cast<Eigen::Index>(k), x.cols());

    // k-means++ seeding
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    out.centroids.row(0) = x.row(static_cast<Eigen::Index>(first(rng)));
    std::vector<double> d2(n);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < c; ++j)
                d = std::min(d, (out.centroids.row(static_cast<Eigen::Index>(j)) -
                                 x.row(static_cast<Eigen::Index>(i))).squaredNorm());
            d2[i] = d;
            total += d;
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            std::discrete_distribution<std::size_t> weighted(d2.begin(), d2.end());
            pick = weighted(rng);
        } else {
            pick = first(rng);
        }
        out.centroids.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(pick));
    }

    out.labels.assign(n, 0);
    std::vector<double> dist(n, 0.0);
    for (std::size_t it = 0; it < 300; ++it) {
        out.iterations = it + 1;
        for (std::size_t i = 0; i < n; ++i)
            out.labels[i] = nearest(out.centroids, x.row(static_cast<Eigen::Index>(i)), dist[i]);

        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(out.centroids.rows(), x.cols());
        std::vector<std::size_t> count(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            next.row(static_cast<Eigen::Index>(out.labels[i])) += x.row(static_cast<Eigen::Index>(i));
            ++count[out.labels[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (count[c] > 0) {
                next.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(count[c]);
                continue;
            }
            // Empty cluster: re-seed at the point farthest from its current centroid.
            const auto far = static_cast<std::size_t>(
                std::distance(dist.begin(), std::max_element(dist.begin(), dist.end())));
            next.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(far));
            dist[far] = 0.0;
        }
        const double shift = (next - out.centroids).rowwise().norm().maxCoeff();
        out.centroids = next;
        if (shift < 1e-6) break;
    }
    out.sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        out.labels[i] = nearest(out.centroids, x.row(static_cast<Eigen::Index>(i)), d);
        out.sse += d;
    }
    return out;
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ seeding; the best of `restarts` seeded runs is kept.
inline Clustering kmeans_cluster(const Eigen::MatrixXd& features, std::size_t k, std::uint64_t seed,
                                 std::size_t restarts = 5) {
    if (features.rows() == 0) throw ContractError("k-means needs at least one point");
    if (k < 1 || k > static_cast<std::size_t>(features.rows()))
        throw ContractError("k must lie in [1, number of points]");
    if (!features.allFinite()) throw ContractError("k-means features must be finite");
    std::mt19937_64 rng(seed);
    Clustering best;
    best.sse = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
        Clustering c = detail::lloyd(features, k, rng);
        if (c.sse < best.sse) best = std::move(c);
    }
    return best;
}

struct KSelection {
    std::size_t k = 1;
    std::size_t elbow_k = 1;
    /// False when no candidate passed the F-test and the elbow k was kept anyway.
    bool validated = true;
    std::vector<double> sse;  // sse[k - 1]
};

/// Beale's F statistic for splitting k1 clusters into k2 > k1 clusters of p-dimensional data.
/// Under a structureless null, SSE shrinks like k^(-2/p); the statistic measures excess shrinkage.
inline double beale_f(double sse1, double sse2, std::size_t n, std::size_t k1, std::size_t k2, std::size_t p) {
    const double nd = static_cast<double>(n);
    const double expected = (nd - static_cast<double>(k1)) / (nd - static_cast<double>(k2)) *
                                std::pow(static_cast<double>(k2) / static_cast<double>(k1), 2.0 / static_cast<double>(p)) -
                            1.0;
    if (sse2 <= 0.0) return std::numeric_limits<double>::infinity();
    return ((sse1 - sse2) / sse2) / expected;
}

inline bool beale_significant(const std::vector<double>& sse, std::size_t n, std::size_t k, std::size_t p,
                              double alpha) {
    if (k < 2) return true;
    if (n <= k) return false;
    const double f = beale_f(sse[k - 2], sse[k - 1], n, k - 1, k, p);
    if (std::isinf(f)) return true;
    const boost::math::fisher_f_distribution<double> dist(static_cast<double>(p),
                                                          static_cast<double>(p * (n - k)));
    return f > boost::math::quantile(dist, 1.0 - alpha);
}

/// Elbow rule over [k_min, k_max]: first k for which going to k+1 recovers less than `threshold`
/// of the one-cluster SSE. The candidate must pass Beale's F-test at level `alpha`; otherwise
/// larger k are tried in turn. If none passes, the elbow k is returned with `validated == false`.
inline KSelection select_k(const Eigen::MatrixXd& features, std::size_t k_min, std::size_t k_max,
                           std::uint64_t seed, double threshold = 0.10, double alpha = 0.05) {
    const auto n = static_cast<std::size_t>(features.rows());
    if (k_min < 1 || k_min > k_max || k_max > n) throw ContractError("k range must lie within [1, n]");
    const auto p = static_cast<std::size_t>(features.cols());

    KSelection out;
    for (std::size_t k = 1; k <= k_max; ++k)
        out.sse.push_back(kmeans_cluster(features, k, derive_seed(seed, {k})).sse);

    out.elbow_k = k_max;
    for (std::size_t k = k_min; k < k_max; ++k) {
        // Coincident points leave rounding-level SSE; treat that as no structure at all.
        const double total = out.sse[0];
        const double floor = 1e-12 * std::max(1.0, features.squaredNorm());
        const double improvement = total > floor ? (out.sse[k - 1] - out.sse[k]) / total : 0.0;
        if (improvement < threshold) {
            out.elbow_k = k;
            break;
        }
    }
    for (std::size_t k = out.elbow_k; k <= k_max; ++k) {
        if (beale_significant(out.sse, n, k, p, alpha)) {
            out.k = k;
            out.validated = true;
            return out;
        }
    }
    out.k = out.elbow_k;
    out.validated = false;
    return out;
}

// ---------------------------------------------------------------------------
// Grouping and subcarriers

struct NomaGrouping {
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::vector<std::size_t>> subcarriers_of_group;
    /// Per group, UEs by descending effective gain (decoded first to last); ties by UE index.
    std::vector<std::vector<std::size_t>> sic_order;

    std::size_t k() const { return groups.size(); }
};

/// Splits subcarriers into contiguous blocks proportional to group size (largest remainder),
/// giving every group at least one subcarrier.
inline NomaGrouping allocate_subcarriers(const std::vector<std::size_t>& labels, std::size_t k,
                                         std::size_t n_subcarriers) {
    if (k < 1) throw ContractError("at least one group is required");
    if (n_subcarriers < k) throw ContractError("fewer subcarriers than groups");
    NomaGrouping g;
    g.groups.resize(k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= k) throw ContractError("group label out of range");
        g.groups[labels[i]].push_back(i);
    }
    for (const auto& members : g.groups)
        if (members.empty()) throw ContractError("empty group in partition");

    const double n = static_cast<double>(labels.size());
    std::vector<std::size_t> count(k);
    std::vector<std::pair<double, std::size_t>> remainder(k);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const double quota = static_cast<double>(n_subcarriers) * static_cast<double>(g.groups[c].size()) / n;
        count[c] = static_cast<std::size_t>(std::floor(quota));
        remainder[c] = {quota - static_cast<double>(count[c]), c};
        assigned += count[c];
    }
    std::stable_sort(remainder.begin(), remainder.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n_subcarriers; ++i, ++assigned) ++count[remainder[i % k].second];
    for (std::size_t c = 0; c < k; ++c) {
        if (count[c] > 0) continue;
        const auto donor = static_cast<std::size_t>(
            std::distance(count.begin(), std::max_element(count.begin(), count.end())));
        --count[donor];
        ++count[c];
    }

    g.subcarriers_of_group.resize(k);
    std::size_t next = 0;
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < count[c]; ++j) g.subcarriers_of_group[c].push_back(next++);
    g.sic_order = g.groups;
    return g;
}

/// Effective gain of a UE across a group's band (mean of its per-subcarrier gains).
inline double group_gain(const UplinkScenario& s, const std::vector<std::size_t>& subcarriers, std::size_t ue) {
    double acc = 0.0;
    for (auto k : subcarriers) acc += s.gain(static_cast<Eigen::Index>(ue), static_cast<Eigen::Index>(k));
    return acc / static_cast<double>(subcarriers.size());
}

inline void assign_sic_order(NomaGrouping& g, const UplinkScenario& s) {
    for (std::size_t c = 0; c < g.k(); ++c) {
        auto& order = g.sic_order[c];
        order = g.groups[c];
        std::vector<double> gain(s.n_ues(), 0.0);
        for (auto ue : order) gain[ue] = group_gain(s, g.subcarriers_of_group[c], ue);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return gain[a] > gain[b] || (gain[a] == gain[b] && a < b);
        });
    }
}

// ---------------------------------------------------------------------------
// Uplink SIC power allocation

/// One NOMA group on a shared band. UEs are indexed in decoding order: UE 0 is decoded
/// first and sees every later UE as interference.
struct SicGroup {
    std::vector<double> gain;
    std::vector<double> min_rate_bps;
    double bandwidth_hz = 0.0;
    double noise_w = 0.0;
    double max_power_w = 0.0;

    std::size_t size() const { return gain.size(); }
};

/// rate_i = B log2(1 + p_i g_i / (noise + sum_{j > i} p_j g_j)).
inline std::vector<double> sic_rates(const SicGroup& g, const std::vector<double>& power) {
    std::vector<double> rate(g.size());
    double interference = 0.0;
    for (std::size_t i = g.size(); i-- > 0;) {
        const double rx = power[i] * g.gain[i];
        rate[i] = g.bandwidth_hz * std::log2(1.0 + rx / (g.noise_w + interference));
        interference += rx;
    }
    return rate;
}

namespace detail {

struct PathPoint {
    double total_rx = 0.0;   // S = sum of received powers
    double power = 0.0;      // sum of transmit powers
    std::vector<double> rx;  // received power per UE
};

// Cheapest way (in transmit power) to reach each level of total received power, as a
// piecewise-linear path of vertices starting from the minimum-power feasible point.
// The minimum-rate constraints x_i >= gamma_i (noise + sum_{j>i} x_j) are linear in the
// received powers x, so each step raises one UE and drags every earlier UE whose
// constraint is tight along with it.
inline std::vector<PathPoint> cheapest_path(const SicGroup& g, std::size_t& binding_ue, double& binding_rate) {
    const std::size_t n = g.size();
    std::vector<double> gamma(n), upper(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        gamma[i] = std::exp2(g.min_rate_bps[i] / g.bandwidth_hz) - 1.0;
        upper[i] = g.max_power_w * g.gain[i];
    }
    double tail = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        x[i] = gamma[i] * (g.noise_w + tail);
        if (x[i] > upper[i] * (1.0 + 1e-12)) {
            binding_ue = i;
            binding_rate = g.bandwidth_hz * std::log2(1.0 + upper[i] / (g.noise_w + tail));
            return {};
        }
        x[i] = std::min(x[i], upper[i]);
        tail += x[i];
    }

    auto lower = [&](std::size_t i) {
        double t = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) t += x[j];
        return gamma[i] * (g.noise_w + t);
    };
    auto snapshot = [&]() {
        PathPoint p;
        p.rx = x;
        for (std::size_t i = 0; i < n; ++i) {
            p.total_rx += x[i];
            p.power += x[i] / g.gain[i];
        }
        return p;
    };

    std::vector<PathPoint> path{snapshot()};
    const double scale = *std::max_element(upper.begin(), upper.end());
    const double eps = 1e-12 * scale;
    std::vector<double> dir(n);
    for (std::size_t guard = 0; guard < 8 * n + 8; ++guard) {
        std::vector<bool> tight(n);
        for (std::size_t i = 0; i < n; ++i) tight[i] = x[i] <= lower(i) + eps;

        double best_rate = std::numeric_limits<double>::infinity();
        std::vector<double> best_dir;
        for (std::size_t k = 0; k < n; ++k) {
            if (x[k] >= upper[k] - eps) continue;
            std::fill(dir.begin(), dir.end(), 0.0);
            dir[k] = 1.0;
            double below = 1.0;  // sum of dir over indices > i, up to k
            bool feasible = true;
            for (std::size_t i = k; i-- > 0;) {
                if (tight[i]) {
                    dir[i] = gamma[i] * below;
                    if (x[i] >= upper[i] - eps) {
                        feasible = false;
                        break;
                    }
                }
                below += dir[i];
            }
            if (!feasible) continue;
            double cost = 0.0, gain = 0.0;
            for (std::size_t i = 0; i <= k; ++i) {
                cost += dir[i] / g.gain[i];
                gain += dir[i];
            }
            if (cost / gain < best_rate) {
                best_rate = cost / gain;
                best_dir = dir;
            }
        }
        if (best_dir.empty()) break;

        double step = std::numeric_limits<double>::infinity();
        double below = 0.0;
        for (std::size_t i = n; i-- > 0;) {
            if (best_dir[i] > 0.0) {
                step = std::min(step, (upper[i] - x[i]) / best_dir[i]);
            } else if (below > 0.0) {
                step = std::min(step, (x[i] - lower(i)) / (gamma[i] * below));
            }
            below += best_dir[i];
        }
        if (!(step > 0.0) || !std::isfinite(step)) break;
        for (std::size_t i = 0; i < n; ++i) x[i] = std::min(upper[i], x[i] + step * best_dir[i]);
        path.push_back(snapshot());
    }
    return path;
}

}  // namespace detail

/// Feasible set of one group summarised by its cheapest-power path.
class GroupFrontier {
public:
    explicit GroupFrontier(SicGroup group) : group_(std::move(group)) {
        if (group_.size() == 0) throw ContractError("empty SIC group");
        std::size_t ue = 0;
        double rate = 0.0;
        path_ = detail::cheapest_path(group_, ue, rate);
        if (path_.empty()) {
            binding_ue_ = ue;
            binding_rate_ = rate;
        }
    }

    bool feasible() const { return !path_.empty(); }
    std::size_t binding_ue() const { return binding_ue_; }
    double binding_rate_bps() const { return binding_rate_; }
    const SicGroup& group() const { return group_; }
    const std::vector<detail::PathPoint>& path() const { return path_; }

    /// Received powers maximising B log2(1 + S / noise) - lambda * sum(p).
    std::vector<double> best_response(double lambda) const {
        const double b = group_.bandwidth_hz;
        const double noise = group_.noise_w;
        for (std::size_t s = 1; s < path_.size(); ++s) {
            const auto& a = path_[s - 1];
            const auto& z = path_[s];
            const double dS = z.total_rx - a.total_rx;
            if (!(dS > 0.0)) continue;
            const double slope = (z.power - a.power) / dS;
            if (lambda <= 0.0 || slope <= 0.0) continue;
            const double target = b / (std::log(2.0) * lambda * slope) - noise;
            if (target >= z.total_rx) continue;
            const double t = std::clamp((target - a.total_rx) / dS, 0.0, 1.0);
            std::vector<double> x(a.rx.size());
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = a.rx[i] + t * (z.rx[i] - a.rx[i]);
            return x;
        }
        return path_.back().rx;
    }

    std::vector<double> power_of(const std::vector<double>& rx) const {
        std::vector<double> p(rx.size());
        for (std::size_t i = 0; i < rx.size(); ++i) p[i] = rx[i] / group_.gain[i];
        return p;
    }

private:
    SicGroup group_;
    std::vector<detail::PathPoint> path_;
    std::size_t binding_ue_ = 0;
    double binding_rate_ = 0.0;
};

enum class Method { kUavAi, kGreedy };

inline std::string to_string(Method m) { return m == Method::kUavAi ? "uav_ai" : "greedy"; }

struct EEResult {
    Method method = Method::kUavAi;
    std::vector<double> power_w;
    std::vector<double> rate_bps;
    double total_bits = 0.0;
    double total_energy_j = 0.0;
    double ee_bits_per_joule = 0.0;
    bool feasible = true;
    std::size_t iterations = 0;
    /// Dinkelbach objective F(lambda) after each outer iteration.
    std::vector<double> objective_trace;
};

inline void finalise(EEResult& r, const NomaConfig& cfg) {
    double rate = 0.0, power = 0.0;
    for (std::size_t i = 0; i < r.rate_bps.size(); ++i) {
        rate += r.rate_bps[i];
        power += r.power_w[i] + cfg.circuit_power_w;
    }
    r.total_bits = rate * cfg.frame_s;
    r.total_energy_j = power * cfg.frame_s;
    r.ee_bits_per_joule = r.total_energy_j > 0.0 ? r.total_bits / r.total_energy_j : 0.0;
}

inline SicGroup make_sic_group(const UplinkScenario& s, const NomaGrouping& g, std::size_t c) {
    SicGroup group;
    const auto& sc = g.subcarriers_of_group[c];
    group.bandwidth_hz = s.subcarrier_bandwidth_hz() * static_cast<double>(sc.size());
    group.noise_w = s.noise_per_subcarrier_w * static_cast<double>(sc.size());
    group.max_power_w = s.config.max_ue_power_w;
    for (auto ue : g.sic_order[c]) {
        group.gain.push_back(group_gain(s, sc, ue));
        group.min_rate_bps.push_back(s.required_rate_bps());
    }
    return group;
}

/// Dinkelbach iterations on EE = sum rate / (sum transmit power + circuit power per UE).
/// Stops once |F(lambda)| <= tol * sum rate, or after 50 outer iterations.
inline EEResult iterative_power_allocation(const NomaGrouping& grouping, const UplinkScenario& s,
                                           double tol = 1e-9) {
    std::vector<GroupFrontier> frontiers;
    for (std::size_t c = 0; c < grouping.k(); ++c) {
        frontiers.emplace_back(make_sic_group(s, grouping, c));
        const auto& f = frontiers.back();
        if (!f.feasible()) {
            const std::size_t ue = grouping.sic_order[c][f.binding_ue()];
            throw InfeasibleError(ue, f.binding_rate_bps(),
                                  "UE " + std::to_string(ue) + " cannot reach " +
                                      std::to_string(s.required_rate_bps()) + " bps; at most " +
                                      std::to_string(f.binding_rate_bps()) + " bps at maximum power");
        }
    }

    EEResult r;
    r.method = Method::kUavAi;
    r.power_w.assign(s.n_ues(), 0.0);
    r.rate_bps.assign(s.n_ues(), 0.0);
    const double circuit = s.config.circuit_power_w * static_cast<double>(s.n_ues());
    double lambda = 0.0;
    for (std::size_t it = 0; it < 50; ++it) {
        double rate = 0.0, power = circuit;
        for (std::size_t c = 0; c < frontiers.size(); ++c) {
            const auto rx = frontiers[c].best_response(lambda);
            const auto p = frontiers[c].power_of(rx);
            const auto rates = sic_rates(frontiers[c].group(), p);
            for (std::size_t j = 0; j < p.size(); ++j) {
                const std::size_t ue = grouping.sic_order[c][j];
                r.power_w[ue] = p[j];
                r.rate_bps[ue] = rates[j];
                rate += rates[j];
                power += p[j];
            }
        }
        const double objective = rate - lambda * power;
        r.objective_trace.push_back(objective);
        r.iterations = it + 1;
        if (std::abs(objective) <= tol * rate) break;
        lambda = rate / power;
    }
    finalise(r, s.config);
    return r;
}

// ---------------------------------------------------------------------------
// Greedy baseline

struct GreedyOutcome {
    EEResult result;
    std::vector<std::vector<std::size_t>> subcarriers_of_ue;
};

inline double ofdma_rate(const UplinkScenario& s, std::size_t ue, const std::vector<std::size_t>& subcarriers,
                         double power_w) {
    if (subcarriers.empty()) return 0.0;
    const double per = power_w / static_cast<double>(subcarriers.size());
    double rate = 0.0;
    for (auto k : subcarriers)
        rate += std::log2(1.0 + per * s.gain(static_cast<Eigen::Index>(ue), static_cast<Eigen::Index>(k)) /
                                    s.noise_per_subcarrier_w);
    return rate * s.subcarrier_bandwidth_hz();
}

/// UEs in order of their best subcarrier gain each grab their strongest remaining subcarriers at
/// full power until their own payload rate is met. Later UEs take what is left; a UE left short
/// makes the outcome infeasible.
inline GreedyOutcome greedy_baseline(const UplinkScenario& s) {
    const std::size_t n = s.n_ues();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> best(n);
    for (std::size_t i = 0; i < n; ++i) best[i] = s.gain.row(static_cast<Eigen::Index>(i)).maxCoeff();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return best[a] > best[b]; });

    GreedyOutcome out;
    out.subcarriers_of_ue.resize(n);
    EEResult& r = out.result;
    r.method = Method::kGreedy;
    r.power_w.assign(n, 0.0);
    r.rate_bps.assign(n, 0.0);
    std::vector<bool> taken(s.n_subcarriers(), false);
    const double pmax = s.config.max_ue_power_w;
    for (std::size_t ue : order) {
        auto& mine = out.subcarriers_of_ue[ue];
        std::vector<std::size_t> free;
        for (std::size_t k = 0; k < taken.size(); ++k)
            if (!taken[k]) free.push_back(k);
        std::stable_sort(free.begin(), free.end(), [&](std::size_t a, std::size_t b) {
            return s.gain(static_cast<Eigen::Index>(ue), static_cast<Eigen::Index>(a)) >
                   s.gain(static_cast<Eigen::Index>(ue), static_cast<Eigen::Index>(b));
        });
        double rate = 0.0;
        for (std::size_t k : free) {
            if (rate >= s.required_rate_bps()) break;
            mine.push_back(k);
            taken[k] = true;
            rate = ofdma_rate(s, ue, mine, pmax);
        }
        r.rate_bps[ue] = rate;
        r.power_w[ue] = mine.empty() ? 0.0 : pmax;
        if (rate < s.required_rate_bps()) r.feasible = false;
    }
    finalise(r, s.config);
    return out;
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepRow {
    double data_size_bits = 0.0;
    double ee_uav_ai = 0.0;
    double ee_greedy = 0.0;
    bool feasible_uav_ai = true;
    bool feasible_greedy = true;
    std::size_t k_selected = 0;
    bool k_validated = true;
};

struct PreparedGrouping {
    UplinkScenario scenario;
    KSelection selection;
    NomaGrouping grouping;
};

inline PreparedGrouping prepare_grouping(const NomaConfig& cfg, std::uint64_t seed) {
    PreparedGrouping p;
    p.scenario = make_uplink_scenario(cfg, derive_seed(seed, {streams::kNomaChannel}));
    const Eigen::MatrixXd features = clustering_features(p.scenario);
    const std::uint64_t cluster_seed = derive_seed(seed, {streams::kNomaCluster});
    p.selection = select_k(features, cfg.k_min, cfg.k_max, cluster_seed, cfg.elbow_threshold, cfg.ftest_alpha);
    const Clustering clusters = kmeans_cluster(features, p.selection.k, derive_seed(cluster_seed, {p.selection.k}));
    p.grouping = allocate_subcarriers(clusters.labels, p.selection.k, cfg.n_subcarriers);
    assign_sic_order(p.grouping, p.scenario);
    return p;
}

/// Both methods at every payload size on one common channel draw and grouping.
inline std::vector<SweepRow> ee_sweep(const NomaConfig& cfg, std::uint64_t seed) {
    if (cfg.data_sizes_bits.empty()) throw ContractError("EE sweep needs at least one data size");
    PreparedGrouping prep = prepare_grouping(cfg, seed);
    std::vector<SweepRow> rows;
    for (double bits : cfg.data_sizes_bits) {
        prep.scenario.data_bits_per_ue = bits;
        SweepRow row;
        row.data_size_bits = bits;
        row.k_selected = prep.selection.k;
        row.k_validated = prep.selection.validated;
        try {
            row.ee_uav_ai = iterative_power_allocation(prep.grouping, prep.scenario).ee_bits_per_joule;
        } catch (const InfeasibleError&) {
            row.feasible_uav_ai = false;
            row.ee_uav_ai = std::numeric_limits<double>::quiet_NaN();
        }
        const GreedyOutcome greedy = greedy_baseline(prep.scenario);
        row.ee_greedy = greedy.result.ee_bits_per_joule;
        row.feasible_greedy = greedy.result.feasible;
        rows.push_back(row);
    }
    return rows;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
    os << "data_size_bits,method,ee_bits_per_joule,k_selected,feasible_flag\n";
    os.precision(12);
    for (const auto& r : rows) {
        os << r.data_size_bits << ",uav_ai," << r.ee_uav_ai << ',' << r.k_selected << ','
           << (r.feasible_uav_ai ? 1 : 0) << '\n';
        os << r.data_size_bits << ",greedy," << r.ee_greedy << ',' << r.k_selected << ','
           << (r.feasible_greedy ? 1 : 0) << '\n';
    }
}

}  // namespace ntnsim::noma
