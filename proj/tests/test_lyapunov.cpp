// Lyapunov functions, exact drifts and the exponent table
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lamperti/lyapunov.hpp"
#include "lamperti/sim_engine.hpp"

using namespace lamperti;
using namespace lamperti::lyapunov;

namespace {

/// Smallest A <= x_max such that sign(drift) == sign(nu) on [A, x_max].
std::int64_t stable_from(const ChainSpec& spec, double gamma, double nu, std::int64_t x_max) {
    std::int64_t a = x_max + 1;
    for (std::int64_t x = x_max; x >= 1; --x) {
        const double d = drift_f(spec, gamma, nu, x);
        if ((d > 0) != (nu > 0) || d == 0.0) break;
        a = x;
    }
    return a;
}

} // namespace

TEST(F, Examples) {
    const double e = std::numbers::e;
    for (double g : {-1.0, 0.0, 2.5}) {
        for (double n : {-2.0, 0.0, 3.0}) EXPECT_NEAR(f(0.0, g, n), std::exp(g), 1e-14 * std::exp(g));
    }
    for (double x : {0.0, 1.0, 123.0}) EXPECT_DOUBLE_EQ(f(x, 0.0, 0.0), 1.0);
    EXPECT_NEAR(f(e * e - e, 1.0, 1.0), 2.0 * e * e, 1e-12);
    EXPECT_THROW(f(-1.0, 1.0, 1.0), ValidationError);
}

TEST(F, IncrementMatchesDifference) {
    for (double x : {1.0, 3.0, 1e3}) {
        for (double h : {-1.0, 1.0}) {
            const double direct = f(x + h, 1.7, -0.4) - f(x, 1.7, -0.4);
            EXPECT_NEAR(increment(x, h, 1.7, -0.4), direct, 1e-9 * std::abs(direct));
        }
    }
}

TEST(Drift, RatioToLeadingTerm) {
    const ChainSpec spec = HalfLineDelta{1.0};
    const auto p = lamperti_params(spec);
    const double x = 1e4;
    const double ratio = drift_f(spec, 1.0 + p.r, 1.0, 10000) / leading_drift(p, 1.0, x);
    EXPECT_GE(ratio, 0.9);
    EXPECT_LE(ratio, 1.1);
}

TEST(Drift, NegativeNuIsSupermartingale) {
    const ChainSpec spec = HalfLineDelta{1.0};
    const auto a = stable_from(spec, 2.0, -1.0, 10000);
    EXPECT_LE(a, 100);
    for (std::int64_t x = a; x <= 10000; ++x) ASSERT_LT(drift_f(spec, 2.0, -1.0, x), 0.0);
}

TEST(Drift, NuZeroLeadingTermVanishes) {
    for (double delta : {-0.5, 0.0, 1.0}) {
        const ChainSpec spec = HalfLineDelta{delta};
        const double r = lamperti_params(spec).r;
        const double x = 1e4;
        EXPECT_LE(std::abs(drift_f(spec, 1.0 + r, 0.0, 10000)), 1e-3 * std::pow(x, r - 1.0)) << delta;
    }
}

TEST(Drift, SignsForRecurrentFamilies) {
    const ChainSpec specs[] = {HalfLineDelta{-0.5}, HalfLineDelta{0.0}, HalfLineDelta{0.5}, HalfLineDelta{1.0},
                               HalfLineDelta{3.0}, TwoSided{0.0, 1.0, 0.5}};
    for (const auto& spec : specs) {
        const double r = lamperti_params(spec).r;
        for (double nu : {-0.5, 0.5}) {
            const auto a = stable_from(spec, 1.0 + r, nu, 10000);
            EXPECT_LE(a, 100) << family_name(spec) << " r=" << r << " nu=" << nu;
        }
    }
}

TEST(Drift, TwoSidedNegativeHalfUsesOwnExponent) {
    const TwoSided ts{0.0, 1.0, 0.5};
    const auto sides = two_sided_params(ts);
    const double r = sides[1].r;
    const double ratio = drift_f(ts, 1.0 + r, 1.0, -10000) / leading_drift(sides[1], 1.0, 1e4);
    EXPECT_GE(ratio, 0.9);
    EXPECT_LE(ratio, 1.1);
}

TEST(Drift, Unsupported) {
    EXPECT_THROW(drift_f(CentralBias{2, 0.0}, 1.0, 1.0, 5), UnsupportedError);
    EXPECT_THROW(drift_f(UrnEmbedded{{{1, 1.0}}}, 1.0, 1.0, 5), UnsupportedError);
    EXPECT_THROW(drift_f(HalfLineDelta{0.0}, 1.0, 1.0, 0), ValidationError);
    EXPECT_THROW(drift_f(TwoSided{0.0, 1.0, 0.5}, 1.0, 1.0, 0), ValidationError);
}

TEST(Classify, Examples) {
    EXPECT_EQ(classify(-2.0), RecurrenceClass::Transient);
    EXPECT_EQ(classify(-1.0), RecurrenceClass::NullRecurrent);
    EXPECT_EQ(classify(1.0), RecurrenceClass::NullRecurrent);
    EXPECT_EQ(classify(2.0), RecurrenceClass::PositiveRecurrent);
}

TEST(Classify, MatchesPathBehaviour) {
    sim::SimConfig cfg;
    cfg.master_seed = 12;
    cfg.horizon = 1'000'000;
    cfg.grid = {1000, 1'000'000};
    const auto transient = sim::run_trajectory(HalfLineDelta{-1.5}, cfg);
    EXPECT_EQ(classify(lamperti_params(HalfLineDelta{-1.5}).r), RecurrenceClass::Transient);
    EXPECT_LT(transient.points[1].excursions - transient.points[0].excursions, 10);
    const auto recurrent = sim::run_trajectory(HalfLineDelta{0.0}, cfg);
    EXPECT_GE(recurrent.points[1].excursions - recurrent.points[0].excursions, 100);
}

// =============================================================================
// Exponent table
// =============================================================================

TEST(ExponentTable, RZero) {
    const auto t = exponent_table(0.0);
    EXPECT_DOUBLE_EQ(*t.m_tail, 1.0);
    EXPECT_DOUBLE_EQ(*t.eta_tail, 0.5);
    EXPECT_EQ(t.max_growth->regime, Regime::Power);
    EXPECT_DOUBLE_EQ(t.max_growth->exponent, 0.5);
    EXPECT_FALSE(t.boundary);
}

TEST(ExponentTable, RThreeLinearS) {
    const std::vector<double> alphas{1.0, 2.0};
    const auto t = exponent_table(3.0, alphas);
    EXPECT_EQ(t.s_growth.at(1.0).regime, Regime::Linear);
    // r = 1 + alpha: nu_alpha is infinite, growth stays polynomial with exponent 1
    EXPECT_EQ(t.s_growth.at(2.0).regime, Regime::Power);
    EXPECT_DOUBLE_EQ(t.s_growth.at(2.0).exponent, 1.0);
    EXPECT_EQ(t.g_growth->regime, Regime::Limit);
    EXPECT_EQ(t.n_growth->regime, Regime::Linear);
    EXPECT_DOUBLE_EQ(t.max_growth->exponent, 0.25);
    EXPECT_DOUBLE_EQ(t.xi_tail.at(1.0), 4.0 / 3.0);
}

TEST(ExponentTable, CentreOfMassBetweenOneAndTwo) {
    const auto t = exponent_table(1.5);
    EXPECT_EQ(t.g_growth->regime, Regime::Power);
    EXPECT_NEAR(t.g_growth->exponent, 0.2, 1e-15);
}

TEST(ExponentTable, AbsentBelowMinusOne) {
    const std::vector<double> alphas{1.0};
    for (double r : {-1.0, -2.0}) {
        const auto t = exponent_table(r, alphas);
        EXPECT_FALSE(t.m_tail.has_value());
        EXPECT_FALSE(t.eta_tail.has_value());
        EXPECT_TRUE(t.xi_tail.empty());
        EXPECT_FALSE(t.max_growth.has_value());
    }
    EXPECT_TRUE(exponent_table(-1.0).boundary);
    EXPECT_TRUE(exponent_table(1.0).boundary);
}

TEST(ExponentTable, ContinuousAtRegimeBoundaries) {
    const double eps = 1e-9;
    for (double alpha : {0.5, 1.0, 2.0}) {
        const std::vector<double> a{alpha};
        const double rb = 1.0 + alpha;
        const auto below = exponent_table(rb - eps, a).s_growth.at(alpha);
        const auto at = exponent_table(rb, a).s_growth.at(alpha);
        EXPECT_NEAR(below.exponent, 1.0, 1e-8);
        EXPECT_EQ(at.exponent, 1.0);
        EXPECT_NEAR((alpha + 2.0) / (1.0 + rb), 1.0, 1e-15);
    }
    EXPECT_DOUBLE_EQ(exponent_table(1.0).n_growth->exponent, 1.0);
    EXPECT_NEAR(exponent_table(1.0 + eps).n_growth->exponent, 1.0, 1e-15);
    EXPECT_NEAR(exponent_table(1.0 - eps).n_growth->exponent, 1.0, 1e-8);
    EXPECT_NEAR(exponent_table(1.0 + eps).max_growth->exponent, 0.5, 1e-8);
    EXPECT_NEAR(exponent_table(2.0 - eps).g_growth->exponent, 0.0, 1e-8);
}
