#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sqhet/errors.hpp"
#include "sqhet/filters.hpp"
#include "sqhet/rng.hpp"
#include "sqhet/spectrum.hpp"

using namespace sqhet;

namespace {

constexpr double kFs = 125e6;

double db(const FilterChain& c, double f) { return 10.0 * std::log10(c.power_response(f)); }

std::vector<double> white(std::size_t n, RngKey key) {
    NormalStream rng(key);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.next();
    return x;
}

}  // namespace

TEST(FilterChain, EmptyIsIdentity) {
    const FilterChain c({}, kFs);
    EXPECT_TRUE(c.empty());
    const auto x = white(256, substream(1, 0, 0, 0));
    EXPECT_EQ(c.apply(x), x);
    EXPECT_DOUBLE_EQ(c.power_response(3e6), 1.0);
}

TEST(FilterChain, RawChainNotchesTheBeat) {
    const FilterChain c(default_raw_chain(), kFs);
    EXPECT_LE(db(c, 10e6) - 20.0, -30.0);
    for (double f = 2e6; f <= 8e6; f += 0.25e6) EXPECT_NEAR(db(c, f), 20.0, 0.35) << f;
    for (double f = 12e6; f <= 13.25e6; f += 0.25e6) EXPECT_NEAR(db(c, f), 20.0, 1.2) << f;
}

TEST(FilterChain, ButterworthCornersAreHalfPower) {
    const FilterChain lp({FilterSpec{FilterKind::low_pass, {15e6, 0.0}, 5, 0.0, 0.0}}, kFs);
    const FilterChain hp({FilterSpec{FilterKind::high_pass, {1.2e6, 0.0}, 5, 0.0, 0.0}}, kFs);
    EXPECT_NEAR(db(lp, 15e6), -3.01, 0.01);
    EXPECT_NEAR(db(hp, 1.2e6), -3.01, 0.01);
    EXPECT_NEAR(db(lp, 1e3), 0.0, 1e-6);
    EXPECT_NEAR(db(hp, 60e6), 0.0, 1e-3);
}

TEST(FilterChain, ChebyshevEdgesSitAtRipple) {
    const FilterChain c({FilterSpec{FilterKind::band_stop, {8.5e6, 11.5e6}, 5, 0.3, 0.0}}, kFs);
    EXPECT_NEAR(db(c, 8.5e6), -0.3, 0.01);
    EXPECT_NEAR(db(c, 11.5e6), -0.3, 0.01);
    EXPECT_LE(db(c, 10e6), -60.0);
}

TEST(FilterChain, GainStage) {
    const FilterChain c({FilterSpec{FilterKind::gain, {0.0, 0.0}, 1, 0.0, 20.0}}, kFs);
    EXPECT_NEAR(c.power_response(7e6), 100.0, 1e-9);
}

TEST(FilterChain, CompensationRestoresWhiteSpectrum) {
    const FilterChain c(default_raw_chain(), kFs);
    const std::size_t n = 5000, frames = 300;
    const auto h = c.bin_response(n);
    SpectrumAccumulator acc(n, kFs, SpectrumKind::auto_psd);
    for (std::size_t f = 0; f < frames; ++f)
        acc.add(FilterChain::apply_response(h, white(n, substream(2, 0, f, 0))));
    const auto s = compensate(acc.result(), c);
    double sum = 0.0;
    int bins = 0;
    for (std::size_t k = 0; k < s.freqs.size(); ++k)
        if (s.freqs[k] > 2e6 && s.freqs[k] < 8e6) {
            sum += s.values[k];
            ++bins;
        }
    const double sigma = window_correlation_factor(n) / std::sqrt(static_cast<double>(bins * frames));
    EXPECT_NEAR(sum / bins, 1.0, 3.0 * sigma);
}

TEST(FilterChain, CircularResponseMatchesCompensationCurve) {
    const FilterChain c(default_raw_chain(), kFs);
    const std::size_t n = 5000;
    const auto h = c.bin_response(n);
    for (std::size_t k = 40; k < n / 2; k += 7) {
        const double f = static_cast<double>(k) * kFs / static_cast<double>(n);
        const double p = c.power_response(f);
        if (p < 1e-3) continue;
        EXPECT_LT(std::abs(10.0 * std::log10(std::norm(h[k]) / p)), 0.01) << f;
        EXPECT_NEAR(std::norm(h[n - k]), std::norm(h[k]), 1e-9 * std::norm(h[k]));
    }
}

TEST(FilterChain, RecursiveMatchesCircularInSteadyState) {
    const FilterChain c(default_demod_chain(), kFs);
    const std::size_t n = 20000;
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t)
        x[t] = std::sin(2.0 * std::numbers::pi * 3.125e6 * static_cast<double>(t) / kFs) +
               0.5 * std::cos(2.0 * std::numbers::pi * 1.875e6 * static_cast<double>(t) / kFs);
    const auto a = c.apply(x);
    const auto b = c.apply_recursive(x);
    double err = 0.0, scale = 0.0;
    for (std::size_t t = n / 2; t < n; ++t) {
        err = std::max(err, std::abs(a[t] - b[t]));
        scale = std::max(scale, std::abs(a[t]));
    }
    EXPECT_LT(err / scale, 1e-6);
}

TEST(FilterChain, SectionsMatchResponse) {
    const FilterChain c(default_raw_chain(), kFs);
    for (double f : {3e6, 9e6, 13e6}) {
        const std::complex<double> z = std::polar(1.0, 2.0 * std::numbers::pi * f / kFs);
        std::complex<double> h = 1.0;
        for (const auto& s : c.sections())
            h *= (s.b0 + s.b1 / z + s.b2 / (z * z)) / (1.0 + s.a1 / z + s.a2 / (z * z));
        EXPECT_NEAR(std::norm(h) / c.power_response(f), 1.0, 1e-9) << f;
    }
}

TEST(FilterSpec, CornersMustBeBelowNyquist) {
    EXPECT_THROW(FilterChain({FilterSpec{FilterKind::low_pass, {70e6, 0.0}, 4, 0.0, 0.0}}, kFs), BandError);
    EXPECT_THROW(FilterChain({FilterSpec{FilterKind::high_pass, {62.5e6, 0.0}, 4, 0.0, 0.0}}, kFs), BandError);
    EXPECT_THROW(FilterChain({FilterSpec{FilterKind::band_stop, {9e6, 8e6}, 4, 0.0, 0.0}}, kFs),
                 std::invalid_argument);
    EXPECT_THROW(FilterChain({FilterSpec{FilterKind::low_pass, {5e6, 0.0}, 0, 0.0, 0.0}}, kFs),
                 std::invalid_argument);
}

TEST(FilterKind, StringRoundTrip) {
    for (auto k : {FilterKind::band_stop, FilterKind::low_pass, FilterKind::high_pass, FilterKind::gain})
        EXPECT_EQ(filter_kind_from_string(to_string(k)), k);
    EXPECT_EQ(to_string(FilterKind::band_stop), "band-stop");
}
