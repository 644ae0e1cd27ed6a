#include <gtest/gtest.h>

#include <sstream>

#include <ntnsim/channel.hpp>

using namespace ntnsim;

namespace {

TerminalPopulation users_at(const GeometryContext& ctx, const SatelliteState& sat,
                            std::initializer_list<std::pair<double, double>> uv) {
    TerminalPopulation p;
    p.min_elevation_deg = ctx.user_min_elevation_deg;
    for (const auto& [u, v] : uv) {
        Terminal t;
        t.position_km = ground_point(ctx, sat, u, v);
        t.reported_position_km = t.position_km;
        p.terminals.push_back(t);
    }
    return p;
}

}  // namespace

TEST(LinkBudget, FreeSpacePathLoss) {
    EXPECT_NEAR(fspl_db(600e3, 20e9), 174.0314, 1e-4);
    EXPECT_NEAR(fspl_db(1075.1e3, 20e9), 179.0974, 1e-4);
}

TEST(LinkBudget, NoiseFromGainAndGOverT) {
    const Terminal t;
    EXPECT_NEAR(noise_power_w(t, 400e6), 1.3247785e-12, 1e-18);
}

TEST(ClearSky, NadirAmplitude) {
    const GeometryContext ctx;
    const auto sat = satellite_state(ctx, 0.0);
    const auto users = users_at(ctx, sat, {{0.0, 0.0}});
    const ArrayGeometry array;
    const auto h = build_clear_sky(users, array, sat, 20e9, 400e6);
    ASSERT_EQ(h.users(), 1);
    ASSERT_EQ(h.elements(), 256);
    EXPECT_EQ(h.kind, ChannelKind::kTrue);
    for (Eigen::Index n = 0; n < h.elements(); ++n) EXPECT_NEAR(std::abs(h.entries(0, n)), 4.824248e-7, 1e-12);
}

TEST(ClearSky, RowIsConjugateSteeringVector) {
    const GeometryContext ctx;
    const auto sat = satellite_state(ctx, 0.0);
    const auto users = users_at(ctx, sat, {{0.2, -0.1}});
    const ArrayGeometry array;
    const auto h = build_clear_sky(users, array, sat, 20e9, 400e6);
    const auto dir = direction_to(sat, users.terminals[0].position_km);
    const Eigen::VectorXcd a = steering_vector(array, dir.u, dir.v);
    const cplx ratio = h.entries(0, 0) / std::conj(a(0));
    for (Eigen::Index n = 0; n < h.elements(); ++n)
        EXPECT_NEAR(std::abs(h.entries(0, n) - ratio * std::conj(a(n))), 0.0, 1e-18);
}

TEST(ClearSky, BelowMinimumElevationThrows) {
    const GeometryContext ctx;
    const auto sat = satellite_state(ctx, 0.0);
    const auto users = users_at(ctx, sat, {{0.85, 0.0}});
    EXPECT_THROW(build_clear_sky(users, ArrayGeometry{}, sat, 20e9, 400e6), DomainError);
}

TEST(Impairments, FoldedLossesAreNonNegativeAndSeeded) {
    const ImpairmentProfile p;
    const auto a = draw_impairments(p, 500, 1, 2);
    const auto b = draw_impairments(p, 500, 1, 2);
    EXPECT_EQ(a.total_db(), b.total_db());
    double mean_shadow = 0.0;
    for (std::size_t i = 0; i < 500; ++i) {
        EXPECT_DOUBLE_EQ(a.atmospheric_db[i], 0.5);
        EXPECT_GE(a.scintillation_db[i], 0.0);
        EXPECT_GE(a.shadow_db[i], 0.0);
        mean_shadow += a.shadow_db[i] / 500.0;
    }
    // Folded normal mean is sigma * sqrt(2 / pi).
    EXPECT_NEAR(mean_shadow, 2.0 * std::sqrt(2.0 / constants::kPi), 0.15);
}

TEST(Impairments, SlowSeedPersistsFastSeedDecorrelates) {
    const ImpairmentProfile p;
    const auto a = draw_impairments(p, 20, 10, 11);
    const auto b = draw_impairments(p, 20, 10, 12);
    EXPECT_EQ(a.shadow_db, b.shadow_db);
    EXPECT_NE(a.scintillation_db, b.scintillation_db);
}

TEST(Impairments, DisabledProfileIsLossless) {
    const auto d = draw_impairments(ImpairmentProfile::disabled(), 5, 1, 2);
    for (double x : d.total_db()) EXPECT_EQ(x, 0.0);
}

TEST(Impairments, ScaleRowsByLoss) {
    ChannelMatrix h;
    h.entries = Eigen::MatrixXcd::Constant(2, 3, cplx(1.0, 1.0));
    h.noise_power_w = Eigen::VectorXd::Ones(2);
    const auto out = apply_3gpp_impairments(h, std::vector<double>{0.0, 20.0});
    EXPECT_NEAR(std::abs(out.entries(0, 2)), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::abs(out.entries(1, 1)), std::sqrt(2.0) / 10.0, 1e-15);
    EXPECT_THROW(apply_3gpp_impairments(h, std::vector<double>{1.0}), ContractError);
}

TEST(Impairments, NeverAddsGain) {
    const GeometryContext ctx;
    const auto sat = satellite_state(ctx, 0.0);
    const auto users = users_at(ctx, sat, {{0.0, 0.0}, {0.1, 0.1}, {-0.2, 0.05}});
    const auto clear = build_clear_sky(users, ArrayGeometry{}, sat, 20e9, 400e6);
    const auto lossy = apply_3gpp_impairments(clear, ImpairmentProfile{}, 99);
    for (Eigen::Index u = 0; u < clear.users(); ++u)
        EXPECT_LT(lossy.entries.row(u).norm(), clear.entries.row(u).norm());
}

TEST(Ancillary, NoiselessCsiCopiesEstimationChannel) {
    const GeometryContext ctx;
    const auto sat0 = satellite_state(ctx, 0.0);
    const auto sat1 = satellite_state(ctx, 0.0167);
    const auto users = users_at(ctx, sat0, {{0.0, 0.0}, {0.1, 0.1}});
    const auto at_est = build_clear_sky(users, ArrayGeometry{}, sat0, 20e9, 400e6);
    const auto at_tx = build_clear_sky(users, ArrayGeometry{}, sat1, 20e9, 400e6);
    const auto est = estimate_csi(at_est, at_tx);
    EXPECT_EQ(est.kind, ChannelKind::kCsiEstimate);
    EXPECT_EQ(est.entries, at_est.entries);
    EXPECT_GT((at_est.entries - at_tx.entries).norm(), 0.0);
    const auto noisy = estimate_csi(at_est, at_tx, -10.0, 3);
    const double rel = (noisy.entries - at_est.entries).squaredNorm() / at_est.entries.squaredNorm();
    EXPECT_NEAR(rel, 0.1, 0.02);
}

TEST(Ancillary, ExactLocationsReproduceTruth) {
    const GeometryContext ctx;
    const auto sat = satellite_state(ctx, 0.0167);
    auto users = users_at(ctx, satellite_state(ctx, 0.0), {{0.0, 0.0}, {0.15, -0.1}});
    report_locations(users, ctx, 0.0, 1);
    const auto truth = build_clear_sky(users, ArrayGeometry{}, sat, 20e9, 400e6);
    const auto inferred = infer_from_location(users, ArrayGeometry{}, sat, 20e9, 400e6);
    EXPECT_EQ(inferred.kind, ChannelKind::kLocationInferred);
    EXPECT_EQ(inferred.entries, truth.entries);
}

TEST(Ancillary, LocationErrorStaysOnSurface) {
    const GeometryContext ctx;
    const auto sat = satellite_state(ctx, 0.0);
    auto users = users_at(ctx, sat, {{0.0, 0.0}, {0.15, -0.1}, {-0.1, 0.2}});
    report_locations(users, ctx, 50.0, 4);
    for (const auto& t : users.terminals) {
        EXPECT_NEAR(t.reported_position_km.norm(), ctx.earth_radius_km, 1e-9);
        const double err_m = (t.reported_position_km - t.position_km).norm() * 1e3;
        EXPECT_GT(err_m, 0.0);
        EXPECT_LT(err_m, 500.0);
    }
    EXPECT_THROW(report_locations(users, ctx, -1.0, 4), ConfigError);
}

TEST(Ancillary, ChannelCsv) {
    ChannelMatrix h;
    h.entries = Eigen::MatrixXcd::Constant(2, 2, cplx(0.5, -0.25));
    std::ostringstream os;
    write_channel_csv(h, os);
    EXPECT_EQ(os.str(), "user,element,re,im\n0,0,0.5,-0.25\n0,1,0.5,-0.25\n1,0,0.5,-0.25\n1,1,0.5,-0.25\n");
}
