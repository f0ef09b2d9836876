#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "sqhet/errors.hpp"
#include "sqhet/field.hpp"
#include "sqhet/spectrum.hpp"

using namespace sqhet;

namespace {

FrequencyGrid small_grid() {
    FrequencyGrid g;
    g.n_samples = 500;  // 250 kHz bins
    return g;
}

// Band-averaged Welch PSD of one quadrature and its 1-sigma statistical error.
struct Psd {
    double mean;
    double sigma;
};

Psd quadrature_psd(const FrequencyGrid& g, std::size_t frames, double center, bool second,
                   const std::function<FieldRealization(std::size_t)>& make) {
    SpectrumAccumulator acc(g.n_samples, g.sample_rate, SpectrumKind::auto_psd);
    for (std::size_t f = 0; f < frames; ++f) {
        const auto q = quadrature_series(make(f), center);
        acc.add(second ? q.a2 : q.a1);
    }
    const auto s = acc.result();
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 4; k + 4 < s.values.size(); ++k, ++n) sum += s.values[k];
    // Hamming-windowed neighbouring bins are correlated; kappa inflates the error.
    const double sigma = window_correlation_factor(g.n_samples) / std::sqrt(static_cast<double>(frames * n));
    return {sum / static_cast<double>(n), sigma};
}

}  // namespace

TEST(Vacuum, Deterministic) {
    const auto g = small_grid();
    const auto a = make_vacuum_field(g, substream(5, 0, 3, 0));
    const auto b = make_vacuum_field(g, substream(5, 0, 3, 0));
    EXPECT_EQ(a.amplitudes, b.amplitudes);
}

TEST(Vacuum, QuadraturePsdIsUnity) {
    const auto g = small_grid();
    for (double center : {0.0, 10e6, -20e6}) {
        for (bool second : {false, true}) {
            const auto p = quadrature_psd(g, 1000, center, second,
                                          [&](std::size_t f) { return make_vacuum_field(g, substream(1, 0, f, 0)); });
            EXPECT_NEAR(p.mean, 1.0, 3.0 * p.sigma) << "center " << center;
        }
    }
}

TEST(Vacuum, ZeroMean) {
    const auto g = small_grid();
    std::complex<double> sum = 0.0;
    const std::size_t frames = 1000;
    for (std::size_t f = 0; f < frames; ++f) sum += make_vacuum_field(g, substream(2, 0, f, 0)).amplitudes[17];
    EXPECT_LT(std::abs(sum) / static_cast<double>(frames), 3.0 / std::sqrt(static_cast<double>(frames)));
}

TEST(Squeezer, ZeroPumpIsBitIdentity) {
    const auto g = small_grid();
    const auto v = make_vacuum_field(g, substream(3, 0, 0, 0));
    SqueezerSpec s;
    s.escape_efficiency = 0.5;
    s.center_freq = 10e6;
    EXPECT_EQ(apply_squeezer(v, s).amplitudes, v.amplitudes);
}

TEST(Squeezer, MatchesLorentzianProfile) {
    const auto g = small_grid();
    SqueezerSpec s;
    s.pump_ratio = std::sqrt(90.0 / 600.0);
    s.escape_efficiency = 0.8;
    s.hwhm = 30e6;
    s.center_freq = 10e6;
    const double expected = opo_squeezing_spectrum(s, 0.0).squeezed;
    EXPECT_NEAR(expected, 0.356, 1e-3);
    EXPECT_NEAR(to_db(expected), -4.48, 0.01);

    SpectrumAccumulator sq(g.n_samples, g.sample_rate, SpectrumKind::auto_psd), anti = sq;
    for (std::size_t f = 0; f < 400; ++f) {
        const auto q = quadrature_series(apply_squeezer(make_vacuum_field(g, substream(4, 0, f, 0)), s), 10e6);
        sq.add(q.a1);
        anti.add(q.a2);
    }
    const auto ps = sq.result(), pa = anti.result();
    // Compare against the model averaged over a low-offset band.
    double sim_s = 0.0, sim_a = 0.0, mod_s = 0.0, mod_a = 0.0;
    for (std::size_t k = 4; k < 40; ++k) {
        const auto m = opo_squeezing_spectrum(s, ps.freqs[k]);
        sim_s += ps.values[k];
        sim_a += pa.values[k];
        mod_s += m.squeezed;
        mod_a += m.antisqueezed;
    }
    EXPECT_NEAR(sim_s / mod_s, 1.0, 0.03);
    EXPECT_NEAR(sim_a / mod_a, 1.0, 0.03);
}

TEST(Squeezer, PurityBound) {
    for (double x : {0.1, 0.387, 0.7, 0.95}) {
        for (double eta : {0.5, 0.8, 1.0}) {
            SqueezerSpec s;
            s.pump_ratio = x;
            s.escape_efficiency = eta;
            for (double e : {0.0, 10e6, 60e6}) {
                const auto p = opo_squeezing_spectrum(s, e);
                EXPECT_GE(p.squeezed * p.antisqueezed, 1.0 - 1e-12);
            }
        }
    }
}

TEST(Squeezer, RejectsThreshold) {
    SqueezerSpec s;
    s.pump_ratio = 1.0;
    EXPECT_THROW(opo_squeezing_spectrum(s, 0.0), std::invalid_argument);
}

TEST(Squeezer, RollsOffAtHwhm) {
    SqueezerSpec s;
    s.pump_ratio = 0.387;
    s.escape_efficiency = 0.8;
    EXPECT_GT(opo_squeezing_spectrum(s, s.hwhm).squeezed, opo_squeezing_spectrum(s, 0.0).squeezed);
    EXPECT_LT(opo_squeezing_spectrum(s, s.hwhm).antisqueezed, opo_squeezing_spectrum(s, 0.0).antisqueezed);
}

TEST(Loss, UnitEfficiencyIsIdentity) {
    const auto g = small_grid();
    const auto v = make_vacuum_field(g, substream(6, 0, 0, 0));
    EXPECT_EQ(apply_loss(v, 1.0, substream(6, 0, 0, 1)).amplitudes, v.amplitudes);
}

TEST(Loss, MixesSqueezedPowerLinearly) {
    const auto g = small_grid();
    // Broadband squeezing to PSD 0.1 at angle 0: x chosen so 1 - 4x/(1+x)^2 = 0.1.
    SqueezerSpec s;
    s.pump_ratio = (1.0 - std::sqrt(0.1)) / (1.0 + std::sqrt(0.1));
    s.hwhm = 1e12;
    ASSERT_NEAR(opo_squeezing_spectrum(s, 0.0).squeezed, 0.1, 1e-9);
    const auto p = quadrature_psd(g, 600, 0.0, false, [&](std::size_t f) {
        const auto sq = apply_squeezer(make_vacuum_field(g, substream(7, 0, f, 0)), s);
        return apply_loss(sq, 0.8, substream(7, 0, f, 1));
    });
    EXPECT_NEAR(p.mean, 0.28, 3.0 * 0.28 * p.sigma);
}

TEST(Loss, VacuumIsFixedPoint) {
    const auto g = small_grid();
    const auto p = quadrature_psd(g, 1000, 5e6, true, [&](std::size_t f) {
        return apply_loss(make_vacuum_field(g, substream(8, 0, f, 0)), 0.3, substream(8, 0, f, 1));
    });
    EXPECT_NEAR(p.mean, 1.0, 3.0 * p.sigma);
}

TEST(Rotate, MovesSqueezedAngle) {
    const auto g = small_grid();
    SqueezerSpec s;
    s.pump_ratio = 0.5;
    s.hwhm = 1e12;
    // Rotating by pi/2 swaps the squeezed and anti-squeezed quadratures.
    const auto p = quadrature_psd(g, 300, 0.0, true, [&](std::size_t f) {
        return rotate(apply_squeezer(make_vacuum_field(g, substream(9, 0, f, 0)), s), 0.5 * std::numbers::pi);
    });
    const double expected = opo_squeezing_spectrum(s, 0.0).squeezed;
    EXPECT_NEAR(p.mean, expected, 3.0 * expected * p.sigma);
}

TEST(QuadratureSeries, RejectsOffGridCenter) {
    const auto g = small_grid();
    const auto v = make_vacuum_field(g, substream(1, 0, 0, 0));
    EXPECT_THROW(quadrature_series(v, 1.234e3), BandError);
    EXPECT_THROW(quadrature_series(v, 200e6), BandError);
}

TEST(QuadratureSeries, CarrierReadsItsPhase) {
    const auto g = small_grid();
    FieldRealization f(g, "carrier");
    add_carrier(f, 3.0, 10e6, 0.4);
    const auto q = quadrature_series(f, 10e6);
    // c(t) exp(-i w t) = 3 exp(0.4 i) = a1 - i a2.
    for (std::size_t t = 0; t < g.n_samples; t += 37) {
        EXPECT_NEAR(q.a1[t], 3.0 * std::cos(0.4), 1e-9);
        EXPECT_NEAR(q.a2[t], -3.0 * std::sin(0.4), 1e-9);
    }
}

TEST(Epr, IdentityHoldsForVacuumAndSqueezedStates) {
    const auto g = small_grid();
    const double df = g.bin_spacing();
    const auto v = make_vacuum_field(g, substream(10, 0, 0, 0));
    EXPECT_LE(epr_identity_residual(v, 0.0, 40 * df), 1e-9);
    SqueezerSpec s;
    s.pump_ratio = 0.6;
    s.squeeze_angle = 0.7;
    s.center_freq = 40 * df;
    s.escape_efficiency = 0.9;
    const auto sq = apply_squeezer(v, s);
    EXPECT_LE(epr_identity_residual(sq, 0.0, 40 * df), 1e-9);
    EXPECT_LE(epr_identity_residual(sq, -30 * df, 25 * df), 1e-9);
}

TEST(Epr, RejectsOutOfBandFrequencies) {
    const auto g = small_grid();
    const auto v = make_vacuum_field(g, substream(10, 0, 0, 0));
    EXPECT_THROW(epr_identity_residual(v, 0.0, 40e6), BandError);
}

TEST(Field, LinearityOfTransforms) {
    const auto g = small_grid();
    const auto a = make_vacuum_field(g, substream(11, 0, 0, 0));
    const auto b = make_vacuum_field(g, substream(11, 0, 1, 0));
    SqueezerSpec s;
    s.pump_ratio = 0.4;
    s.center_freq = 5e6;
    const auto lhs = apply_squeezer(2.0 * a + b, s);
    const auto rhs = 2.0 * apply_squeezer(a, s) + apply_squeezer(b, s);
    for (std::size_t k = 0; k < g.n_samples; ++k) EXPECT_NEAR(std::abs(lhs.amplitudes[k] - rhs.amplitudes[k]), 0.0, 1e-12);
}

TEST(Field, TimeEnvelopeRoundTrip) {
    const auto g = small_grid();
    const auto a = make_vacuum_field(g, substream(12, 0, 0, 0));
    const auto back = from_time_envelope(g, time_envelope(a), "back");
    for (std::size_t k = 0; k < g.n_samples; ++k) EXPECT_NEAR(std::abs(back.amplitudes[k] - a.amplitudes[k]), 0.0, 1e-12);
}
