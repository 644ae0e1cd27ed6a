#pragma once

// Monte-Carlo orchestration over drops and result emission.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "leo.hpp"
#include "noma.hpp"
#include "scenario.hpp"

namespace ntnsim {

/// Runs every drop of a beamforming scenario. Drops are pulled from a shared counter by
/// `cfg.workers` threads; output is ordered by drop id and then by configured scheme order,
/// so it does not depend on the worker count.
inline std::vector<ResultRecord> run(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.experiment != Experiment::kLeoBeamforming)
        throw ConfigError("run() drives the leo_beamforming experiment; use run_noma() for uav_noma_ee");
    std::vector<std::vector<ResultRecord>> per_drop(cfg.n_drops);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t d = next++; d < cfg.n_drops; d = next++) per_drop[d] = simulate_drop(cfg, d);
    };
    const std::size_t n_threads = std::min(cfg.workers, cfg.n_drops);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    std::vector<ResultRecord> records;
    records.reserve(cfg.n_drops * cfg.schemes.size());
    for (auto& drop : per_drop)
        for (auto& r : drop) records.push_back(r);
    return records;
}

inline std::vector<noma::SweepRow> run_noma(const ScenarioConfig& cfg) {
    cfg.validate();
    return noma::ee_sweep(cfg.noma, cfg.master_seed);
}

// ---------------------------------------------------------------------------
// Emission

inline constexpr const char* kResultHeader =
    "drop_id,scheme,channel_mode,system_capacity_bps,mean_sinr_db,mean_spectral_efficiency,seed";

inline void write_records_csv(const std::vector<ResultRecord>& records, std::ostream& os) {
    os << kResultHeader << '\n';
    os.precision(17);
    for (const auto& r : records) {
        os << r.drop_id << ',' << to_string(r.scheme) << ',' << to_string(r.channel_mode) << ','
           << r.system_capacity_bps << ',' << r.mean_sinr_db << ',' << r.mean_spectral_efficiency << ','
           << r.seed << '\n';
    }
}

struct SchemeStats {
    Scheme scheme = Scheme::kFR3;
    std::size_t drops = 0;
    std::size_t flagged = 0;
    double mean_capacity_bps = 0.0;
    double sd_capacity_bps = 0.0;
    double mean_sinr_db = 0.0;
    double mean_spectral_efficiency = 0.0;
};

struct RelativeGain {
    Scheme user_centric = Scheme::kMMSE;
    Scheme baseline = Scheme::kFR3;
    /// (C_user_centric - C_baseline) / C_baseline of mean capacities.
    double gain = 0.0;
};

struct Summary {
    std::vector<SchemeStats> schemes;
    std::vector<RelativeGain> gains;

    const SchemeStats& of(Scheme s) const {
        for (const auto& st : schemes)
            if (st.scheme == s) return st;
        throw ContractError("scheme " + to_string(s) + " not in summary");
    }

    double gain(Scheme user_centric, Scheme baseline) const {
        for (const auto& g : gains)
            if (g.user_centric == user_centric && g.baseline == baseline) return g.gain;
        throw ContractError("no gain for " + to_string(user_centric) + " over " + to_string(baseline));
    }
};

inline Summary summarise(const std::vector<ResultRecord>& records) {
    if (records.empty()) throw ContractError("no records to summarise");
    std::vector<Scheme> order;
    for (const auto& r : records)
        if (std::find(order.begin(), order.end(), r.scheme) == order.end()) order.push_back(r.scheme);

    Summary s;
    for (Scheme scheme : order) {
        SchemeStats st;
        st.scheme = scheme;
        double sum = 0.0, sum_sq = 0.0, sinr = 0.0, se = 0.0;
        for (const auto& r : records) {
            if (r.scheme != scheme) continue;
            if (!r.ok) {
                ++st.flagged;
                continue;
            }
            ++st.drops;
            sum += r.system_capacity_bps;
            sum_sq += r.system_capacity_bps * r.system_capacity_bps;
            sinr += r.mean_sinr_db;
            se += r.mean_spectral_efficiency;
        }
        if (st.drops > 0) {
            const double n = static_cast<double>(st.drops);
            st.mean_capacity_bps = sum / n;
            st.sd_capacity_bps =
                st.drops > 1 ? std::sqrt(std::max(0.0, (sum_sq - n * st.mean_capacity_bps * st.mean_capacity_bps) / (n - 1.0)))
                             : 0.0;
            st.mean_sinr_db = sinr / n;
            st.mean_spectral_efficiency = se / n;
        }
        s.schemes.push_back(st);
    }
    for (const auto& uc : s.schemes) {
        if (!is_user_centric(uc.scheme)) continue;
        for (const auto& fr : s.schemes) {
            if (is_user_centric(fr.scheme) || fr.mean_capacity_bps <= 0.0) continue;
            s.gains.push_back({uc.scheme, fr.scheme, (uc.mean_capacity_bps - fr.mean_capacity_bps) / fr.mean_capacity_bps});
        }
    }
    return s;
}

inline void print_summary(const Summary& s, std::ostream& os) {
    os.setf(std::ios::fixed);
    os.precision(3);
    os << "scheme    drops  flagged  mean_capacity_gbps  sd_gbps  mean_sinr_db  mean_se_bps_hz\n";
    for (const auto& st : s.schemes) {
        std::string name = to_string(st.scheme);
        name.resize(9, ' ');
        os << name << ' ' << st.drops << "  " << st.flagged << "  " << st.mean_capacity_bps / 1e9 << "  "
           << st.sd_capacity_bps / 1e9 << "  " << st.mean_sinr_db << "  " << st.mean_spectral_efficiency << '\n';
    }
    for (const auto& g : s.gains)
        os << "gain " << to_string(g.user_centric) << " vs " << to_string(g.baseline) << ": " << g.gain * 100.0
           << " %\n";
    os.unsetf(std::ios::fixed);
}

/// Writes the records CSV to `path` and returns the per-scheme summary.
inline Summary emit_results(const std::vector<ResultRecord>& records, const std::string& path) {
    if (records.empty()) throw ContractError("no records to emit");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_records_csv(records, out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
    return summarise(records);
}

}  // namespace ntnsim
