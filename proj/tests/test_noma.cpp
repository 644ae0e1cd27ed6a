#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include <ntnsim/noma.hpp>

#include "properties.hpp"

using namespace ntnsim;
using namespace ntnsim::noma;

TEST(NomaChannel, PathLossReference) {
    const NomaConfig cfg;
    EXPECT_NEAR(pathloss_db(cfg, 1.0), 38.468383, 1e-6);
    EXPECT_NEAR(pathloss_db(cfg, 100.0), 38.468383 + 54.0, 1e-6);
}

TEST(NomaChannel, ScenarioShapeAndSeeding) {
    const NomaConfig cfg;
    const auto a = make_uplink_scenario(cfg, 3);
    const auto b = make_uplink_scenario(cfg, 3);
    const auto c = make_uplink_scenario(cfg, 4);
    EXPECT_EQ(a.gain.rows(), 70);
    EXPECT_EQ(a.gain.cols(), 128);
    EXPECT_EQ(a.gain, b.gain);
    EXPECT_NE(a.gain, c.gain);
    EXPECT_DOUBLE_EQ(a.subcarrier_bandwidth_hz(), 78125.0);
    EXPECT_NEAR(10.0 * std::log10(a.noise_per_subcarrier_w * 1e3), -174.0 + 10.0 * std::log10(78125.0), 1e-9);
    EXPECT_GE(a.distance_m.minCoeff(), 100.0);
    EXPECT_LE(a.distance_m.maxCoeff(), std::hypot(500.0, 100.0));
}

TEST(NomaChannel, FeaturesAreStandardised) {
    const auto s = make_uplink_scenario(NomaConfig{}, 9);
    const auto f = clustering_features(s);
    ASSERT_EQ(f.cols(), 2);
    for (Eigen::Index c = 0; c < 2; ++c) {
        const double mean = f.col(c).mean();
        const double var = (f.col(c).array() - mean).square().sum() / static_cast<double>(f.rows());
        EXPECT_NEAR(mean, 0.0, 1e-12);
        EXPECT_NEAR(var, 1.0, 1e-9);
    }
}

TEST(KMeans, SingleClusterIsTheMean) {
    Eigen::MatrixXd x(4, 2);
    x << 0, 0, 2, 0, 0, 2, 2, 2;
    const auto c = kmeans_cluster(x, 1, 1);
    EXPECT_NEAR(c.centroids(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(c.centroids(0, 1), 1.0, 1e-12);
    EXPECT_NEAR(c.sse, 8.0, 1e-12);
}

TEST(KMeans, RejectsBadK) {
    const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
    EXPECT_THROW(kmeans_cluster(x, 0, 1), ContractError);
    EXPECT_THROW(kmeans_cluster(x, 4, 1), ContractError);
    EXPECT_THROW(kmeans_cluster(Eigen::MatrixXd(0, 2), 1, 1), ContractError);
}

TEST(KMeans, BlobRecovery) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto r = ntnsim_test::kmeans_blob_recovery(seed);
        EXPECT_TRUE(r.pass) << "seed " << seed << ": " << r.detail;
    }
}

TEST(SelectK, IdenticalPointsGiveOne) {
    const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(30, 2, 0.7);
    const auto s = select_k(x, 1, 6, 1);
    EXPECT_EQ(s.k, 1u);
    EXPECT_TRUE(s.validated);
}

TEST(SelectK, UniformCloudIsFlagged) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd x(300, 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i) << u(rng), u(rng);
    const auto s = select_k(x, 1, 8, 1);
    EXPECT_FALSE(s.validated);
    EXPECT_EQ(s.k, s.elbow_k);
}

TEST(SelectK, SseIsNonIncreasing) {
    const auto s = make_uplink_scenario(NomaConfig{}, 2);
    const auto sel = select_k(clustering_features(s), 1, 8, 5);
    ASSERT_EQ(sel.sse.size(), 8u);
    for (std::size_t k = 1; k < sel.sse.size(); ++k) EXPECT_LE(sel.sse[k], sel.sse[k - 1] * (1.0 + 1e-9));
}

TEST(SelectK, BealeStatistic) {
    // Structureless shrinkage gives F = 1.
    const std::size_t n = 100, p = 2;
    const double sse1 = 50.0;
    const double expected_ratio = (n - 2.0) / (n - 3.0) * std::pow(3.0 / 2.0, 2.0 / p) - 1.0;
    const double sse2 = sse1 / (1.0 + expected_ratio);
    EXPECT_NEAR(beale_f(sse1, sse2, n, 2, 3, p), 1.0, 1e-12);
    EXPECT_THROW(select_k(Eigen::MatrixXd::Zero(3, 2), 1, 4, 1), ContractError);
}

TEST(Subcarriers, ProportionalContiguousBlocks) {
    const std::vector<std::size_t> labels{0, 0, 1, 2, 0, 0, 1, 2};
    const auto g = allocate_subcarriers(labels, 3, 16);
    ASSERT_EQ(g.k(), 3u);
    EXPECT_EQ(g.subcarriers_of_group[0].size(), 8u);
    EXPECT_EQ(g.subcarriers_of_group[1].size(), 4u);
    EXPECT_EQ(g.subcarriers_of_group[2].size(), 4u);
    std::size_t next = 0;
    for (const auto& block : g.subcarriers_of_group)
        for (auto k : block) EXPECT_EQ(k, next++);
    EXPECT_EQ(next, 16u);
}

TEST(Subcarriers, EveryGroupGetsOne) {
    std::vector<std::size_t> labels(98, 0);
    labels.push_back(1);
    labels.push_back(2);
    const auto g = allocate_subcarriers(labels, 3, 3);
    for (const auto& block : g.subcarriers_of_group) EXPECT_EQ(block.size(), 1u);
    EXPECT_THROW(allocate_subcarriers(labels, 3, 2), ContractError);
    EXPECT_THROW(allocate_subcarriers({0, 0, 2}, 3, 6), ContractError);
}

TEST(Sic, OrderIsDescendingGain) {
    const auto s = make_uplink_scenario(NomaConfig{}, 4);
    auto g = allocate_subcarriers(std::vector<std::size_t>(70, 0), 1, 128);
    assign_sic_order(g, s);
    const auto& order = g.sic_order[0];
    for (std::size_t i = 1; i < order.size(); ++i)
        EXPECT_GE(group_gain(s, g.subcarriers_of_group[0], order[i - 1]),
                  group_gain(s, g.subcarriers_of_group[0], order[i]));
}

TEST(Sic, TwoUserHandComputed) {
    SicGroup g;
    g.gain = {4.0, 1.0};
    g.min_rate_bps = {0.0, 0.0};
    g.bandwidth_hz = 1.0;
    g.noise_w = 1.0;
    const auto r = sic_rates(g, {1.0, 3.0});
    EXPECT_NEAR(r[0], std::log2(1.0 + 4.0 / 4.0), 1e-15);
    EXPECT_NEAR(r[1], std::log2(1.0 + 3.0), 1e-15);
}

TEST(Sic, SumRateIdentity) {
    const auto r = ntnsim_test::sic_identity(31);
    EXPECT_TRUE(r.pass) << r.detail;
}

TEST(Dinkelbach, MatchesGridSearch) {
    const auto r = ntnsim_test::dinkelbach_vs_grid(41);
    EXPECT_TRUE(r.pass) << r.detail;
}

TEST(Dinkelbach, NoRandomFeasiblePointDoesBetter) {
    const auto r = ntnsim_test::dinkelbach_random_bound(42);
    EXPECT_TRUE(r.pass) << r.detail;
}

TEST(Dinkelbach, ConvergesAndMeetsRates) {
    const auto prep = prepare_grouping(NomaConfig{}, 1);
    auto s = prep.scenario;
    s.data_bits_per_ue = 6e5;
    const auto r = iterative_power_allocation(prep.grouping, s);
    EXPECT_TRUE(r.feasible);
    EXPECT_LT(r.iterations, 50u);
    EXPECT_LE(std::abs(r.objective_trace.back()), 1e-9 * std::accumulate(r.rate_bps.begin(), r.rate_bps.end(), 0.0));
    for (std::size_t i = 1; i + 1 < r.objective_trace.size(); ++i) EXPECT_GE(r.objective_trace[i], -1e-6);
    for (std::size_t ue = 0; ue < s.n_ues(); ++ue) {
        EXPECT_GE(r.rate_bps[ue], 6e5 * (1.0 - 1e-9));
        EXPECT_GE(r.power_w[ue], 0.0);
        EXPECT_LE(r.power_w[ue], 0.2 * (1.0 + 1e-9));
    }
}

TEST(Dinkelbach, InfeasiblePayloadNamesTheUe) {
    const auto prep = prepare_grouping(NomaConfig{}, 1);
    auto s = prep.scenario;
    s.data_bits_per_ue = 5e7;
    try {
        iterative_power_allocation(prep.grouping, s);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_LT(e.ue(), 70u);
        EXPECT_GT(e.max_rate_bps(), 0.0);
        EXPECT_LT(e.max_rate_bps(), 5e7);
    }
}

TEST(Greedy, SingleUeMatchesBruteForce) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> lg(-12.0, -10.0), bits(2e5, 2e6);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> gains(6);
        for (auto& g : gains) g.push_back(std::pow(10.0, lg(rng)));
        // One UE across six subcarriers.
        ntnsim::noma::UplinkScenario s = ntnsim_test::tiny_scenario({{0.0}}, bits(rng));
        s.config.n_subcarriers = 6;
        s.config.bandwidth_hz = 6e6;
        s.gain.resize(1, 6);
        for (int k = 0; k < 6; ++k) s.gain(0, k) = gains[static_cast<std::size_t>(k)][0];
        const auto g = greedy_baseline(s);

        double best_rate = -1.0;
        std::size_t best_count = 7;
        for (unsigned mask = 1; mask < 64; ++mask) {
            std::vector<std::size_t> subset;
            for (std::size_t k = 0; k < 6; ++k)
                if (mask & (1u << k)) subset.push_back(k);
            const double rate = ofdma_rate(s, 0, subset, 0.2);
            if (rate < s.required_rate_bps()) continue;
            if (subset.size() < best_count || (subset.size() == best_count && rate > best_rate)) {
                best_count = subset.size();
                best_rate = rate;
            }
        }
        if (best_count == 7) {
            EXPECT_FALSE(g.result.feasible);
            continue;
        }
        EXPECT_TRUE(g.result.feasible);
        EXPECT_EQ(g.subcarriers_of_ue[0].size(), best_count);
        EXPECT_NEAR(g.result.rate_bps[0], best_rate, 1e-9 * best_rate);
        EXPECT_NEAR(g.result.ee_bits_per_joule, best_rate / (0.2 + 1.4002), 1e-9 * best_rate);
    }
}

TEST(Greedy, SubcarriersAreExclusive) {
    auto s = make_uplink_scenario(NomaConfig{}, 6);
    s.data_bits_per_ue = 8e5;
    const auto g = greedy_baseline(s);
    std::vector<int> owner(128, -1);
    for (std::size_t ue = 0; ue < 70; ++ue)
        for (auto k : g.subcarriers_of_ue[ue]) {
            EXPECT_EQ(owner[k], -1);
            owner[k] = static_cast<int>(ue);
        }
}

TEST(Greedy, ExcessivePayloadIsInfeasible) {
    auto s = make_uplink_scenario(NomaConfig{}, 6);
    s.data_bits_per_ue = 5e7;
    EXPECT_FALSE(greedy_baseline(s).result.feasible);
}

TEST(Sweep, DeterministicAndOrdered) {
    const NomaConfig cfg;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto a = ee_sweep(cfg, seed);
        const auto b = ee_sweep(cfg, seed);
        ASSERT_EQ(a.size(), cfg.data_sizes_bits.size());
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].ee_uav_ai, b[i].ee_uav_ai);
            EXPECT_EQ(a[i].ee_greedy, b[i].ee_greedy);
            EXPECT_TRUE(a[i].feasible_uav_ai);
            EXPECT_GE(a[i].ee_uav_ai, a[i].ee_greedy) << "seed " << seed << " size " << a[i].data_size_bits;
            EXPECT_LE(a[i].ee_uav_ai, prev * (1.0 + 1e-12));
            prev = a[i].ee_uav_ai;
        }
    }
}

TEST(Sweep, GapIsRoughlyConstant) {
    const auto rows = ee_sweep(NomaConfig{}, 1);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : rows) {
        lo = std::min(lo, r.ee_uav_ai - r.ee_greedy);
        hi = std::max(hi, r.ee_uav_ai - r.ee_greedy);
    }
    EXPECT_GT(lo, 0.0);
    EXPECT_LT(hi / lo, 1.25);
}

TEST(Sweep, CsvLayout) {
    NomaConfig cfg;
    cfg.data_sizes_bits = {2e5};
    std::ostringstream os;
    write_sweep_csv(ee_sweep(cfg, 1), os);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "data_size_bits,method,ee_bits_per_joule,k_selected,feasible_flag");
    EXPECT_NE(s.find("\n200000,uav_ai,"), std::string::npos);
    EXPECT_NE(s.find("\n200000,greedy,"), std::string::npos);
}
