#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "sqhet/filters.hpp"
#include "sqhet/rng.hpp"
#include "sqhet/trace.hpp"

namespace sqhet {

/// Mixer followed by a post-mixer filter chain.
///
/// y(t) = x(t) cos(2 pi lo_freq t + lo_phase + d(t)), then filtered and
/// optionally decimated. d(t) is white LO phase noise of rms
/// `lo_phase_noise_rms`, drawn per channel; it is zero by default.
struct DemodSpec {
    double lo_freq = 10e6;
    double lo_phase = 0.0;
    std::vector<FilterSpec> chain = default_demod_chain();
    std::size_t decimation = 1;
    double lo_phase_noise_rms = 0.0;
};

class Demodulator {
public:
    Demodulator(DemodSpec spec, const FrequencyGrid& grid);

    /// `key` is only used when LO phase noise is enabled.
    [[nodiscard]] PhotocurrentTrace operator()(const PhotocurrentTrace& trace, RngKey key = {}) const;

    [[nodiscard]] const FilterChain& chain() const { return chain_; }
    [[nodiscard]] const DemodSpec& spec() const { return spec_; }
    /// Grid of the output trace (after decimation).
    [[nodiscard]] const FrequencyGrid& output_grid() const { return out_grid_; }

private:
    DemodSpec spec_;
    FrequencyGrid grid_;
    FrequencyGrid out_grid_;
    FilterChain chain_;
    std::vector<std::complex<double>> response_;
    std::vector<double> lo_cos_;
    std::vector<double> lo_sin_;
};

PhotocurrentTrace demodulate(const PhotocurrentTrace& trace, double lo_freq, double lo_phase);

/// rms LO phase noise whose demodulated contribution is `rel` times the
/// demodulated unsqueezed shot floor, for beat amplitudes e1, e2.
double lo_phase_noise_rms(double e1, double e2, double efficiency, double rel);

}  // namespace sqhet
