#include <gtest/gtest.h>

#include "rankone/errors.hpp"
#include "rankone/oracle.hpp"
#include "rankone/sampling.hpp"
#include "test_support.hpp"

using namespace rankone;
using rankone::testing::desk_schedule;
using rankone::testing::random_slab;

TEST(OrbitAdvance, ZeroTimeIsIdentity) {
    const Schedule& s = desk_schedule();
    Rng rng(41);
    for (int i = 0; i < 20; ++i) {
        const auto p = random_point(rng, s);
        EXPECT_EQ(oracle::orbit_advance(p, Rat(0), s), p);
    }
}

TEST(OrbitAdvance, StaysInsideTheTowerWhenPossible) {
    const Schedule& s = desk_schedule();
    oracle::PointState p{1, Rat(1, 3), Rat(1, 5), {}};
    const auto q = oracle::orbit_advance(p, Rat(1, 2), s);
    EXPECT_EQ(q.stage, 1);
    EXPECT_EQ(q.height, Rat(7, 10));
    // leaving X_1 through column 2 (x in [1/4, 1/2)) lands at o_2 + height
    const auto r = oracle::orbit_advance(p, Rat(1), s);
    EXPECT_EQ(r.stage, 2);
    EXPECT_EQ(r.column_path, std::vector<int>{2});
    EXPECT_EQ(r.height, s.stage(1).offsets[1] + Rat(6, 5));
}

TEST(OrbitAdvanceProperty, FlowAdditivity) {
    const Schedule& s = desk_schedule();
    Rng rng(43);
    for (int i = 0; i < 150; ++i) {
        const auto p = random_point(rng, s);
        const Rat a = random_rational(rng, Rat(0), s.height(3), 16);
        const Rat b = random_rational(rng, Rat(0), s.height(3), 16);
        const auto once = oracle::orbit_advance(p, a + b, s);
        const auto twice = oracle::orbit_advance(oracle::orbit_advance(p, a, s), b, s);
        const int top = std::max(once.stage, twice.stage);
        ASSERT_EQ(oracle::lift(once, top, s), oracle::lift(twice, top, s));
    }
}

TEST(OrbitAdvance, HorizonExceeded) {
    const Schedule& s = desk_schedule();
    const oracle::PointState p{1, Rat(0), Rat(0), {}};
    EXPECT_THROW(oracle::orbit_advance(p, s.height(8) * Rat(2), s), HorizonExceeded);
}

TEST(Contains, MatchesRefinement) {
    const Schedule& s = desk_schedule();
    Rng rng(47);
    std::mt19937_64 srng(48);
    for (int i = 0; i < 2000; ++i) {
        const auto p = random_point(rng, s);
        const Rat t = random_rational(rng, Rat(0), s.height(3), 32);
        const SlabSet b = random_slab(srng, 1 + static_cast<int>(srng() % 2), s);
        ASSERT_TRUE(membership_check(p, t, b, s).agree) << "t=" << t;
    }
}

TEST(OracleCorrelation, TrivialCases) {
    const Schedule& s = desk_schedule();
    const SlabSet y = base_tower(s);
    const auto e = oracle::oracle_correlation(y, y, Rat(0), 1000, s);
    EXPECT_EQ(e.value, Rat(1));
    const SlabSet lo = make_slab(s, 1, IntervalSet{{Rat(0), Rat(1, 2)}});
    const SlabSet hi = make_slab(s, 1, IntervalSet{{Rat(1, 2), Rat(1)}});
    EXPECT_EQ(oracle::oracle_correlation(lo, hi, Rat(0), 1000, s).value, Rat(0));
    EXPECT_THROW(oracle::oracle_correlation(y, y, Rat(0), 0, s), Error);
}

TEST(OracleCorrelation, WithinBoundOfExactEngine) {
    const Schedule& s = desk_schedule();
    const auto family = slab_family(s, {1, 2}, {1, 2, 4});
    Rng rng(53);
    const auto triples = random_triples(rng, family, 30, s.height(3), s);
    for (const auto& tr : triples) {
        const auto& a = family[tr.a].set;
        const auto& b = family[tr.b].set;
        const auto e = oracle::oracle_correlation(a, b, tr.t, 2000, s);
        ASSERT_LE(abs(e.value - correlation(a, b, tr.t, s)), e.bound)
            << family[tr.a].name << " " << family[tr.b].name << " t=" << tr.t;
    }
}

TEST(OracleCorrelation, ProfileIntegralByQuadrature) {
    const Schedule& s = desk_schedule();
    const SlabSet y = base_tower(s);
    const Rat width(3);
    const long cells = 48;
    const Rat dt = width / Rat(cells);
    const PiecewiseLinear p = correlation_profile(y, y, Rat(0), width, s);
    Rat quad(0), slack(0);
    for (long k = 0; k < cells; ++k) {
        const auto e = oracle::oracle_correlation(y, y, dt * Rat(2 * k + 1, 2), 4000, s);
        quad += e.value * dt;
        slack += e.bound * dt;
    }
    // midpoint rule is exact on linear pieces; each kink costs at most |Δslope| dt^2 / 4
    const auto& t = p.breakpoints();
    const auto& v = p.values();
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        const Rat left = (v[i] - v[i - 1]) / (t[i] - t[i - 1]);
        const Rat right = (v[i + 1] - v[i]) / (t[i + 1] - t[i]);
        slack += abs(right - left) * dt * dt / Rat(4);
    }
    EXPECT_LE(abs(quad - p.integral()), slack);
}
