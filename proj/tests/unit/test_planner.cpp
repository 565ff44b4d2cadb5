#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dimest/planner.hpp"

using namespace dimest;

namespace {
constexpr double tau = 2.0 * std::numbers::pi;
const ScalePair s4{0.54, 0.23};
}

TEST(Rho, Definition) {
    EXPECT_NEAR(rho_for_target(s4, 0.24989122185537092, 0.1), 0.0010231449390012292, 1e-15);
    EXPECT_THROW(rho_for_target(s4, 0.0, 0.1), DomainError);
    EXPECT_THROW(rho_for_target(s4, 0.2, 1.0), DomainError);
}

TEST(TheoreticalPlan, ReferenceLaws) {
    for (const auto& r : reference::kRows) {
        const auto p = theoretical_plan(Dimension(r.d), {r.eps1, r.eps2}, r.alpha1, std::pow(tau, r.d));
        EXPECT_EQ(static_cast<long>(std::ceil(p.law.n_const)), r.n_const) << "d=" << r.d;
        EXPECT_EQ(static_cast<long>(std::ceil(p.law.n_coeff)), r.n_coeff) << "d=" << r.d;
    }
}

TEST(TheoreticalPlan, TorusFourPoints) {
    const double vol = std::pow(tau, 4);
    const auto p = theoretical_plan(Dimension(4), s4, 0.06, vol);
    EXPECT_EQ(p.law.table_points(vol), 18262);
    EXPECT_NEAR(p.delta, 0.24989122185537092, 1e-12);
    EXPECT_NEAR(p.rho, 0.0010231449390012292, 1e-15);
}

TEST(TheoreticalPlan, Monotonicity) {
    // Larger volume needs more points; more tolerated failure needs fewer.
    const auto a = n_required(Dimension(3), {0.63, 0.23}, 0.1, 100.0, 0.001);
    const auto b = n_required(Dimension(3), {0.63, 0.23}, 0.1, 400.0, 0.001);
    const auto c = n_required(Dimension(3), {0.63, 0.23}, 0.1, 400.0, 0.002);
    EXPECT_LT(a, b);
    EXPECT_LT(c, b);
}

TEST(TheoreticalPlan, InfeasibleWhenGapNotPositive) {
    EXPECT_THROW(theoretical_plan(Dimension(3), {0.9, 0.85}, 0.1, 100.0), InfeasiblePlan);
    EXPECT_THROW(theoretical_plan(Dimension(3), {0.63, 0.23}, 1.0, 100.0), DomainError);
}

TEST(ScaleSearch, DimensionFourMatchesReference) {
    const auto p = scale_search(Dimension(4), std::pow(tau, 4));
    EXPECT_NEAR(p.scales.eps1, 0.54, 1e-9);
    EXPECT_NEAR(p.scales.eps2, 0.23, 1e-9);
    EXPECT_NEAR(p.alpha1, 0.06, 1e-9);
}

TEST(ScaleSearch, RespectsBounds) {
    ScaleSearchOptions o;
    o.eps1_min = 0.78;
    o.eps1_max = 0.78;
    const auto p = scale_search(Dimension(2), tau * tau, o);
    EXPECT_NEAR(p.scales.eps1, 0.78, 1e-12);
    EXPECT_NEAR(p.scales.eps2, 0.20, 0.01 + 1e-9);
}

TEST(ScaleSearch, OptimumBeatsReferencePointForItsObjective) {
    const double vol = std::pow(tau, 3);
    const auto p = scale_search(Dimension(3), vol);
    const auto* r = reference::row(3);
    const auto at_table = n_required_unrelaxed(Dimension(3), {r->eps1, r->eps2}, r->alpha1, vol,
                                               rho_for_target({r->eps1, r->eps2},
                                                              gap_delta(Dimension(3), {r->eps1, r->eps2}), 0.1));
    EXPECT_LE(p.objective, at_table + 1e-9);
}

TEST(Heuristic, StatsDimensionFour) {
    const auto st = heuristic_stats(4.0, s4);
    EXPECT_NEAR(st.gap, 0.0114322, 1e-7);
    EXPECT_NEAR(st.sigma, 0.178403, 1e-6);
    EXPECT_NEAR(st.mean, std::pow(0.23 / 0.54, 4), 1e-15);
}

TEST(Heuristic, CltPairs) {
    EXPECT_EQ(pairs_required_clt(Dimension(4), s4, 1.64), 655);
    // gap = z sigma makes the budget exactly one pair.
    const auto st = heuristic_stats(2.0, {0.78, 0.2});
    EXPECT_EQ(pairs_required_clt(Dimension(2), {0.78, 0.2}, st.gap / st.sigma), 1);
}

TEST(Heuristic, ExactPairsReferenceTable) {
    for (const auto& r : reference::kRows) {
        EXPECT_EQ(pairs_required_exact(Dimension(r.d), {r.eps1, r.eps2}, 0.9), r.pairs_90) << "d=" << r.d;
        EXPECT_EQ(pairs_required_exact(Dimension(r.d), {r.eps1, r.eps2}, 0.7), r.pairs_70) << "d=" << r.d;
    }
}

TEST(Heuristic, ExactPairsIsStableThreshold) {
    const long long N = pairs_required_exact(Dimension(2), {0.78, 0.2}, 0.9);
    EXPECT_LT(binomial_success_probability(N - 1, Dimension(2), {0.78, 0.2}), 0.9);
    for (long long k = N; k < N + 400; ++k)
        EXPECT_GE(binomial_success_probability(k, Dimension(2), {0.78, 0.2}), 0.9) << k;
}

TEST(Heuristic, SuccessProbabilityIsAProbability) {
    for (long long N : {1LL, 5LL, 50LL, 500LL, 5000LL}) {
        const double p = binomial_success_probability(N, Dimension(3), {0.63, 0.23});
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
    }
}

TEST(Heuristic, PointsForPairs) {
    EXPECT_EQ(points_for_pairs(516, Dimension(4), 0.54, std::pow(tau, 4)), 1958);
    EXPECT_EQ(points_for_pairs(1, Dimension(2), 0.01, 1e-6), 2);
}

TEST(Heuristic, PointCoefficientsCeilToReference) {
    for (const auto& r : reference::kRows)
        EXPECT_EQ(static_cast<long>(std::ceil(heuristic_point_coefficient(Dimension(r.d)))), r.heuristic_coeff)
            << "d=" << r.d;
}

TEST(Heuristic, HigherConfidenceNeedsMorePairs) {
    for (int d = 1; d <= 6; ++d) {
        const auto s = reference_scales(Dimension(d));
        EXPECT_LT(pairs_required_exact(Dimension(d), s, 0.7), pairs_required_exact(Dimension(d), s, 0.9));
    }
}
