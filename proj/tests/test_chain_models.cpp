// Chain families, Lamperti constants, exact one-step laws
#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "lamperti/chain_models.hpp"
#include "lamperti/random.hpp"

using namespace lamperti;

// =============================================================================
// Lamperti constants
// =============================================================================

TEST(LampertiParams, HalfLineDeltaOne) {
    const auto p = lamperti_params(HalfLineDelta{1.0});
    EXPECT_DOUBLE_EQ(p.c, -0.5);
    EXPECT_DOUBLE_EQ(p.s2, 1.0);
    EXPECT_DOUBLE_EQ(p.r, 1.0);
    EXPECT_EQ(p.cls, RecurrenceClass::NullRecurrent);
}

TEST(LampertiParams, UrnKappaOne) {
    const auto p = lamperti_params(UrnEmbedded{{{1, 1.0}}});
    EXPECT_DOUBLE_EQ(p.c, -0.25);
    EXPECT_DOUBLE_EQ(p.s2, 1.0 / 6.0);
    EXPECT_NEAR(p.r, 3.0, 1e-15);
    EXPECT_EQ(p.cls, RecurrenceClass::PositiveRecurrent);
}

TEST(LampertiParams, CentralBias) {
    const auto p = lamperti_params(CentralBias{2, -1.0});
    EXPECT_DOUBLE_EQ(p.c, -0.75);
    EXPECT_DOUBLE_EQ(p.s2, 0.5);
    EXPECT_DOUBLE_EQ(p.r, 3.0);
    // r from the constants and from 1 - d - 2 d rho
    EXPECT_DOUBLE_EQ(-2.0 * p.c / p.s2, 1.0 - 2.0 - 2.0 * 2.0 * -1.0);
    EXPECT_EQ(lamperti_params(CentralBias{2, 0.0}).r, -1.0);
}

TEST(LampertiParams, RatioIdentityAllFamilies) {
    const ChainSpec specs[] = {HalfLineDelta{-1.5}, HalfLineDelta{0.25}, TwoSided{0.0, 1.0, 0.5},
                               CentralBias{3, 0.4},  UrnEmbedded{{{0, 0.5}, {2, 0.5}}}};
    for (const auto& s : specs) {
        const auto p = lamperti_params(s);
        EXPECT_NEAR(p.r, -2.0 * p.c / p.s2, 1e-14) << family_name(s);
        EXPECT_EQ(p.cls, classify(p.r)) << family_name(s);
    }
}

TEST(LampertiParams, TwoSidedSides) {
    const auto sides = two_sided_params(TwoSided{0.0, 1.0, 0.5});
    EXPECT_DOUBLE_EQ(sides[0].r, 0.0);
    EXPECT_DOUBLE_EQ(sides[1].r, 1.0);
}

// =============================================================================
// Validation
// =============================================================================

TEST(Validate, DeltaBelowMinusTwo) {
    try {
        validate(HalfLineDelta{-2.5});
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("delta > -2"), std::string::npos) << e.what();
    }
    EXPECT_THROW(validate(HalfLineDelta{-2.0}), ValidationError);
    EXPECT_NO_THROW(validate(HalfLineDelta{-1.99}));
}

TEST(Validate, OtherFamilies) {
    EXPECT_THROW(validate(TwoSided{0.0, 0.0, 0.0}), ValidationError);
    EXPECT_THROW(validate(TwoSided{0.0, -3.0, 0.5}), ValidationError);
    EXPECT_THROW(validate(CentralBias{0, 1.0}), ValidationError);
    EXPECT_THROW(validate(UrnEmbedded{}), ValidationError);
    EXPECT_THROW(validate(UrnEmbedded{{{1, 0.5}}}), ValidationError);
    EXPECT_THROW(validate(UrnEmbedded{{{1, 1.5}, {2, -0.5}}}), ValidationError);
}

// =============================================================================
// One-step laws
// =============================================================================

TEST(Successors, SymmetricAtFive) {
    const auto s = successors(HalfLineDelta{0.0}, std::int64_t{5});
    ASSERT_EQ(s.size(), 2u);
    std::map<std::int64_t, double> law;
    for (const auto& x : s) law[std::get<std::int64_t>(x.state)] += x.probability;
    EXPECT_DOUBLE_EQ(law[4], 0.5);
    EXPECT_DOUBLE_EQ(law[6], 0.5);
}

TEST(Successors, OriginGoesToOne) {
    for (double delta : {-1.0, 0.0, 2.0}) {
        const auto s = successors(HalfLineDelta{delta}, std::int64_t{0});
        double to_one = 0.0;
        for (const auto& x : s) {
            if (std::get<std::int64_t>(x.state) == 1) to_one += x.probability;
        }
        EXPECT_DOUBLE_EQ(to_one, 1.0);
    }
}

TEST(Successors, CentralBiasUnbiasedOrigin) {
    const auto s = successors(CentralBias{2, 0.0}, LatticePoint::Zero(2));
    ASSERT_EQ(s.size(), 4u);
    for (const auto& x : s) {
        EXPECT_DOUBLE_EQ(x.probability, 0.25);
        EXPECT_EQ(std::get<LatticePoint>(x.state).cwiseAbs().sum(), 1);
    }
}

TEST(Successors, UrnUnsupported) {
    EXPECT_THROW(successors(UrnEmbedded{{{1, 1.0}}}, std::int64_t{3}), UnsupportedError);
    EXPECT_THROW(conditional_moments(UrnEmbedded{{{1, 1.0}}}, std::int64_t{3}), UnsupportedError);
}

TEST(ConditionalMoments, DeltaOneAtTen) {
    // 1/2 -+ 1/42 at x = 10
    const auto m = conditional_moments(HalfLineDelta{1.0}, std::int64_t{10});
    EXPECT_NEAR(m.mean, -1.0 / 21.0, 1e-15);
    EXPECT_DOUBLE_EQ(m.second_moment, 1.0);
}

TEST(ConditionalMoments, SecondMomentIsOne) {
    for (double delta : {-1.5, -0.5, 0.0, 0.5, 1.0, 3.0}) {
        for (std::int64_t x : {1, 2, 7, 1000}) {
            EXPECT_DOUBLE_EQ(conditional_moments(HalfLineDelta{delta}, x).second_moment, 1.0);
        }
    }
}

TEST(ConditionalMoments, TwoSidedNegativeSide) {
    // mirrored delta-family at |x| = 4: 1/2 + 1/18 toward 0
    const auto m = conditional_moments(TwoSided{0.0, 1.0, 0.5}, std::int64_t{-4});
    EXPECT_NEAR(m.mean, 1.0 / 9.0, 1e-15);
}

TEST(ConditionalMoments, DriftMatchesLampertiConstant) {
    for (double delta : {-0.5, 0.0, 1.0, 3.0}) {
        const double c = lamperti_params(HalfLineDelta{delta}).c;
        const double x = 1e6;
        const auto m = conditional_moments(HalfLineDelta{delta}, static_cast<std::int64_t>(x));
        EXPECT_LT(std::abs(x * m.mean - c), 1e-5) << "delta " << delta;
    }
}

TEST(TransitionLaw, ProbabilitiesValidOnLongRange) {
    for (double delta : {-1.9, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0}) {
        for (std::int64_t x = 1; x <= 10000; ++x) {
            const auto bd = birth_death(HalfLineDelta{delta}, x);
            ASSERT_GT(bd.up, 0.0) << delta << " " << x;
            ASSERT_LT(bd.up, 1.0) << delta << " " << x;
            ASSERT_GT(bd.down, 0.0) << delta << " " << x;
            ASSERT_NEAR(bd.up + bd.down, 1.0, 1e-15);
        }
    }
}

TEST(TransitionLaw, EmpiricalFrequencies) {
    // delta = 1 at x = 3: up = 3/7
    const ChainSpec spec = HalfLineDelta{1.0};
    auto s = derive_stream(5, 0);
    const int n = 1'000'000;
    int up = 0;
    for (int i = 0; i < n; ++i) up += std::get<std::int64_t>(step(spec, std::int64_t{3}, s)) == 4;
    const double p = 3.0 / 7.0;
    EXPECT_LT(std::abs(up - n * p), 4.0 * std::sqrt(n * p * (1 - p)));
}

TEST(TransitionLaw, EmpiricalFrequenciesLattice) {
    const CentralBias cb{2, 0.7};
    const ChainSpec spec = cb;
    LatticePoint x(2);
    x << 3, -2;
    const auto law = successors(spec, x);
    std::map<std::pair<std::int64_t, std::int64_t>, int> count;
    auto s = derive_stream(6, 0);
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
        const auto y = std::get<LatticePoint>(step(spec, x, s));
        ++count[{y(0), y(1)}];
    }
    for (const auto& succ : law) {
        const auto& y = std::get<LatticePoint>(succ.state);
        const double p = succ.probability;
        EXPECT_LT(std::abs(count[{y(0), y(1)}] - n * p), 4.0 * std::sqrt(n * p * (1 - p)));
    }
}

// =============================================================================
// Centrally biased walk
// =============================================================================

TEST(CentralBias, ExactMomentsOutsideClippedRegion) {
    std::mt19937_64 gen(3);
    for (int d : {1, 2, 3}) {
        const double rho = 0.8;
        const CentralBias spec{d, rho};
        std::uniform_int_distribution<std::int64_t> coord(-60, 60);
        int tested = 0;
        while (tested < 100) {
            LatticePoint x(d);
            for (int i = 0; i < d; ++i) x(i) = coord(gen);
            const double norm = std::sqrt(static_cast<double>(x.squaredNorm()));
            if (norm <= 10.0 * d * rho) continue;
            ++tested;
            const auto m = lattice_moments(spec, x);
            const Eigen::VectorXd mu = rho * x.cast<double>() / static_cast<double>(x.squaredNorm());
            EXPECT_LT((m.mean - mu).cwiseAbs().maxCoeff(), 1e-15);
            const Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(d, d) / d;
            EXPECT_LT((m.second_moment - cov).cwiseAbs().maxCoeff(), 1e-15);
        }
    }
}

TEST(CentralBias, Radial) {
    LatticePoint a(2), b(3);
    a << 3, 4;
    b << 1, 1, 1;
    EXPECT_DOUBLE_EQ(radial(a), 5.0);
    EXPECT_DOUBLE_EQ(radial(LatticePoint::Zero(2)), 0.0);
    EXPECT_DOUBLE_EQ(radial(b), std::sqrt(3.0));
}

TEST(CentralBias, StrongInwardBiasConfinesWalk) {
    // With d |rho| >= 2 the clipped bias at (1,0) and (1,1) points straight
    // back, so the walk never leaves the box |x_i| <= 1.
    const ChainSpec spec = CentralBias{2, -1.0};
    auto s = derive_stream(8, 0);
    ChainState x = origin(spec);
    for (int t = 0; t < 100000; ++t) {
        x = step(spec, x, s);
        ASSERT_LE(std::get<LatticePoint>(x).cwiseAbs().maxCoeff(), 1);
    }
}
