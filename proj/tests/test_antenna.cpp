#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include <ntnsim/antenna.hpp>

using namespace ntnsim;

TEST(SteeringVector, TwoElementHalfWavelengthEndfire) {
    ArrayGeometry a;
    a.n_rows = 2;
    a.n_cols = 1;
    const auto s = steering_vector(a, 1.0, 0.0);
    ASSERT_EQ(s.size(), 2);
    EXPECT_NEAR(std::arg(s(0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(std::arg(s(1))), constants::kPi, 1e-12);
}

TEST(SteeringVector, BoresightIsAllOnes) {
    const ArrayGeometry a;
    const auto s = steering_vector(a, 0.0, 0.0);
    EXPECT_EQ(s.size(), 256);
    EXPECT_NEAR((s - Eigen::VectorXcd::Ones(256)).norm(), 0.0, 1e-12);
}

TEST(SteeringVector, RowMajorIndexing) {
    ArrayGeometry a;
    a.n_rows = 3;
    a.n_cols = 4;
    const double u = 0.21, v = -0.37;
    const auto s = steering_vector(a, u, v);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 4; ++c) {
            const double phase = 2.0 * constants::kPi * 0.5 * (r * u + c * v);
            const auto expected = std::polar(1.0, phase);
            EXPECT_NEAR(std::abs(s(static_cast<Eigen::Index>(r * 4 + c)) - expected), 0.0, 1e-12);
        }
}

TEST(SteeringVector, NormIsSqrtN) {
    const ArrayGeometry a;
    EXPECT_NEAR(steering_vector(a, 0.3, 0.4).norm(), 16.0, 1e-12);
}

TEST(SteeringVector, RejectsInvisibleDirection) {
    const ArrayGeometry a;
    EXPECT_THROW(steering_vector(a, 0.8, 0.8), DomainError);
}

TEST(ElementGain, CosinePowerRollOff) {
    const ArrayGeometry a;
    EXPECT_DOUBLE_EQ(element_gain(a, 0.0), 8.0);
    EXPECT_NEAR(element_gain(a, 60.0) - 8.0, -6.0206, 1e-4);
    EXPECT_DOUBLE_EQ(element_gain(a, 90.0), 8.0 - 30.0);
    EXPECT_GE(element_gain(a, 89.9), 8.0 - 30.0);
}

TEST(ElementGain, RejectsOutOfRange) {
    const ArrayGeometry a;
    EXPECT_THROW(element_gain(a, -1.0), DomainError);
    EXPECT_THROW(element_gain(a, 91.0), DomainError);
}

TEST(ArrayGeometry, ValidatesShape) {
    ArrayGeometry a;
    a.n_rows = 0;
    EXPECT_THROW(a.validate(), ConfigError);
}

TEST(BeamLattice, SizesAndCentre) {
    const auto lat = generate_beam_lattice(20.0, 19, ReuseScheme::kFR3);
    ASSERT_EQ(lat.size(), 19u);
    EXPECT_EQ(lat.n_colours, 3);
    EXPECT_DOUBLE_EQ(lat.beams[0].u, 0.0);
    EXPECT_DOUBLE_EQ(lat.beams[0].v, 0.0);
    EXPECT_NEAR(lat.spacing_uv, std::sin(constants::deg2rad(20.0)) / 2.5, 1e-15);
    EXPECT_DOUBLE_EQ(lat.bandwidth_share(), 1.0 / 3.0);
}

TEST(BeamLattice, NeighboursAreOneSpacingApart) {
    const auto lat = generate_beam_lattice(20.0, 37, ReuseScheme::kFR4);
    for (std::size_t i = 0; i < lat.size(); ++i)
        for (std::size_t j = i + 1; j < lat.size(); ++j) {
            const double d = std::hypot(lat.beams[i].u - lat.beams[j].u, lat.beams[i].v - lat.beams[j].v);
            if (lat.adjacent(i, j))
                EXPECT_NEAR(d, lat.spacing_uv, 1e-12);
            else
                EXPECT_GT(d, lat.spacing_uv * 1.5);
        }
}

TEST(BeamLattice, ColourCounts) {
    std::set<int> fr3, fr4;
    for (const auto& b : generate_beam_lattice(20.0, 19, ReuseScheme::kFR3).beams) fr3.insert(b.colour);
    for (const auto& b : generate_beam_lattice(20.0, 19, ReuseScheme::kFR4).beams) fr4.insert(b.colour);
    EXPECT_EQ(fr3.size(), 3u);
    EXPECT_EQ(fr4.size(), 4u);
    for (const auto& b : generate_beam_lattice(20.0, 19, ReuseScheme::kFull).beams) EXPECT_EQ(b.colour, 0);
}

TEST(BeamLattice, SsbCap) {
    EXPECT_EQ(ssb_beam_cap(2e9), 8u);
    EXPECT_EQ(ssb_beam_cap(20e9), 64u);
    EXPECT_NO_THROW(generate_beam_lattice(20.0, 64, ReuseScheme::kFR4, 20e9));
    EXPECT_NO_THROW(generate_beam_lattice(20.0, 8, ReuseScheme::kFR4, 2e9));
    try {
        generate_beam_lattice(20.0, 65, ReuseScheme::kFR3, 20e9);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("64"), std::string::npos);
    }
    EXPECT_THROW(generate_beam_lattice(20.0, 9, ReuseScheme::kFR3, 2e9), ConfigError);
    EXPECT_THROW(generate_beam_lattice(20.0, 0, ReuseScheme::kFR3), ConfigError);
}

TEST(BeamLattice, CsvHeader) {
    std::ostringstream os;
    write_lattice_csv(generate_beam_lattice(20.0, 7, ReuseScheme::kFR3), os);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "beam_id,u,v,colour");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 8);
}
