#include <gtest/gtest.h>

#include <cmath>

#include "oracles/covariance_oracle.hpp"
#include "sqhet/analytic.hpp"

using namespace sqhet;

TEST(CovarianceOracle, VacuumIsUnity) {
    oracle::Setup s;
    EXPECT_NEAR(oracle::straightforward_floor(s), 1.0, 1e-12);
}

TEST(CovarianceOracle, MatchesClosedFormOnSweep) {
    // ten (s, a) points from pure states to lossy ones
    const double pts[10][2] = {{1.0, 1.0},  {0.5, 2.0},   {0.356, 4.30}, {0.1, 10.0}, {0.2, 3.0},
                               {0.8, 1.1},  {0.05, 25.0}, {0.3, 0.3},    {2.0, 2.0},  {0.6, 7.5}};
    for (const auto& p : pts) {
        oracle::Setup s;
        s.beams[0] = {100.0, p[0], p[1], 0.3};
        s.beams[1] = {100.0, p[0], p[1], 1.1};
        const double expected = straightforward_phase_floor(p[0], p[1]);
        EXPECT_NEAR(oracle::straightforward_floor(s) / expected, 1.0, 1e-6) << p[0] << ", " << p[1];
    }
}

TEST(CovarianceOracle, UnequalBeamsMatchWeightedBudget) {
    oracle::Setup s;
    s.beams[0] = {30.0, 0.4, 3.0, 0.0};
    s.beams[1] = {90.0, 0.7, 1.6, 0.5};
    std::array<SourceTerm, 2> src;
    src[0].weight = 90.0 * 90.0;  // source 1 is read by beam 2
    src[0].powers = {0.4, 3.0};
    src[1].weight = 30.0 * 30.0;
    src[1].powers = {0.7, 1.6};
    EXPECT_NEAR(oracle::straightforward_floor(s) / straightforward_budget(src, 0.0).floor, 1.0, 1e-6);
}

TEST(CovarianceOracle, IndependentOfAnalysisBin) {
    oracle::Setup s;
    s.beams[0] = s.beams[1] = {1.0, 0.356, 4.30, 0.0};
    const double a = oracle::straightforward_floor(s);
    s.analysis_bin = 3;
    s.beat_bin = 11;
    EXPECT_NEAR(oracle::straightforward_floor(s), a, 1e-9);
    EXPECT_NEAR(10.0 * std::log10(a), 1.27, 0.01);
}
