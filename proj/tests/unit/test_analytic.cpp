#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sqhet/analytic.hpp"

using namespace sqhet;

namespace {

SqueezingLevels measured_levels() {
    SqueezingLevels l;
    l.sources[0] = {4.5, 3.7, 0.0, 0.0};
    l.sources[1] = {4.16, 4.0, 0.0, 0.0};
    return l;
}

double deg(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

TEST(PredictedReduction, SidebandAverages) {
    const auto l = measured_levels();
    EXPECT_NEAR(predicted_reduction(l, Sideband::lower), 4.33, 0.005);
    EXPECT_NEAR(predicted_reduction(l, Sideband::upper), 3.85, 0.005);
    EXPECT_NEAR(predicted_reduction(l, Sideband::demod), 4.08, 0.005);
    EXPECT_NEAR(predicted_reduction(l, Sideband::lower),
                -10.0 * std::log10(0.5 * (std::pow(10.0, -0.45) + std::pow(10.0, -0.416))), 1e-12);
}

TEST(PredictedReduction, RejectsNonPositiveWeights) {
    auto l = measured_levels();
    l.weights = {0.0, 1.0};
    EXPECT_THROW(predicted_reduction(l, Sideband::lower), std::invalid_argument);
}

TEST(OpoSpectrum, VacuumAtZeroPump) {
    SqueezerSpec s;
    const auto p = opo_squeezing_spectrum(s, 3e6);
    EXPECT_DOUBLE_EQ(p.squeezed, 1.0);
    EXPECT_DOUBLE_EQ(p.antisqueezed, 1.0);
}

TEST(ClassicalLimit, Ceiling) {
    EXPECT_NEAR(classical_noise_limit(0.1, 0.0), 10.0, 1e-9);
    EXPECT_NEAR(classical_noise_limit(0.0, std::pow(10.0, -1.5)), 15.0, 1e-9);
    EXPECT_NEAR(classical_noise_limit(0.1, std::pow(10.0, -1.5)), 8.91, 0.005);
}

TEST(PhaseJitter, Penalty) {
    const double s = std::pow(10.0, -1.5), a = std::pow(10.0, 1.5);
    EXPECT_DOUBLE_EQ(phase_jitter_penalty(s, a, 0.0), s);
    const double eff = phase_jitter_penalty(s, a, deg(1.5));
    EXPECT_NEAR(eff, 0.0533, 0.0005);
    EXPECT_NEAR(-to_db(eff), 12.7, 0.05);
    EXPECT_NEAR(phase_jitter_penalty(1.0, 1.0, 0.3), 1.0, 1e-15);
}

TEST(PhaseJitter, GaussianAverageSmallAngleAgreement) {
    const double s = 0.1, a = 10.0, sigma = deg(1.0);
    // Small jitter: exact Gaussian average approaches the small-angle form.
    EXPECT_NEAR(mean_quadrature_power(s, a, 0.0, sigma), phase_jitter_penalty(s, a, sigma), 1e-5);
    EXPECT_DOUBLE_EQ(mean_quadrature_power(s, a, 0.0, 0.0), s);
    EXPECT_NEAR(mean_quadrature_power(s, a, 0.5 * std::numbers::pi, 0.0), a, 1e-12);
}

TEST(Straightforward, Floor) {
    EXPECT_DOUBLE_EQ(straightforward_phase_floor(1.0, 1.0), 1.0);
    EXPECT_NEAR(straightforward_phase_floor(0.356, 4.30), 1.34, 0.005);
    EXPECT_NEAR(to_db(straightforward_phase_floor(0.356, 4.30)), 1.27, 0.01);
    EXPECT_GT(straightforward_phase_floor(1e-3, 1e3), 100.0);
}

TEST(Budget, ProposedTermsSum) {
    std::array<SourceTerm, 2> src;
    src[0].powers = {0.356, 4.3};
    src[0].efficiency = 0.96;
    src[1].powers = {0.4, 3.9};
    src[1].efficiency = 0.96;
    const auto b = proposed_budget(src, 0.1, 0.05);
    EXPECT_NEAR(b.squeezed + b.antisqueezed + b.loss_vacuum + b.classical + b.electronic, b.floor, 1e-12);
    EXPECT_DOUBLE_EQ(b.antisqueezed, 0.0);
    EXPECT_GT(b.classical, 0.0);
}

TEST(Budget, AngleErrorLeaksAntisqueezing) {
    std::array<SourceTerm, 2> src;
    src[0].powers = src[1].powers = {0.3, 4.0};
    const auto aligned = proposed_budget(src, 0.0);
    EXPECT_NEAR(aligned.floor, 0.3, 1e-12);
    src[0].angle_error = src[1].angle_error = 0.5 * std::numbers::pi;
    EXPECT_NEAR(proposed_budget(src, 0.0).floor, 4.0, 1e-12);
}

TEST(Budget, StraightforwardMatchesFormula) {
    std::array<SourceTerm, 2> src;
    src[0].powers = src[1].powers = {0.356, 4.30};
    EXPECT_NEAR(straightforward_budget(src, 0.0).floor, straightforward_phase_floor(0.356, 4.30), 1e-12);
}

TEST(Budget, UnsqueezedIsUnity) {
    std::array<SourceTerm, 2> src;
    EXPECT_NEAR(proposed_budget(src, 0.1).floor, 1.0, 1e-12);
    EXPECT_NEAR(proposed_budget(src, 0.1).reduction_db(), 0.0, 1e-12);
}

TEST(Scheme, StringRoundTrip) {
    for (auto s : {Scheme::proposed, Scheme::straightforward, Scheme::unsqueezed})
        EXPECT_EQ(scheme_from_string(to_string(s)), s);
    EXPECT_THROW(scheme_from_string("bogus"), std::invalid_argument);
}
