#include "sqhet/demod.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sqhet/errors.hpp"

namespace sqhet {

Demodulator::Demodulator(DemodSpec spec, const FrequencyGrid& grid)
    : spec_(std::move(spec)), grid_(grid), out_grid_(grid), chain_(spec_.chain, grid.sample_rate) {
    grid_.validate();
    if (!(spec_.lo_freq > 0.0 && spec_.lo_freq < 0.5 * grid_.nyquist()))
        throw BandError("demodulator: lo_freq must be inside (0, Nyquist/2)");
    if (spec_.decimation == 0 || grid_.n_samples % spec_.decimation != 0 ||
        (grid_.n_samples / spec_.decimation) % 2 != 0)
        throw BandError("demodulator: decimation must divide the frame into an even length");
    if (!(spec_.lo_phase_noise_rms >= 0.0)) throw std::invalid_argument("demodulator: LO phase noise must be >= 0");
    out_grid_.sample_rate = grid_.sample_rate / static_cast<double>(spec_.decimation);
    out_grid_.n_samples = grid_.n_samples / spec_.decimation;
    response_ = chain_.bin_response(grid_.n_samples);
    lo_cos_.resize(grid_.n_samples);
    lo_sin_.resize(grid_.n_samples);
    for (std::size_t n = 0; n < grid_.n_samples; ++n) {
        const double arg = 2.0 * std::numbers::pi * spec_.lo_freq * grid_.time(n) + spec_.lo_phase;
        lo_cos_[n] = std::cos(arg);
        lo_sin_[n] = std::sin(arg);
    }
}

PhotocurrentTrace Demodulator::operator()(const PhotocurrentTrace& trace, RngKey key) const {
    if (!(trace.grid == grid_)) throw BandError("demodulator: trace grid differs from design grid");
    const std::size_t n = grid_.n_samples;
    std::vector<double> mixed(n);
    if (spec_.lo_phase_noise_rms > 0.0) {
        NormalStream rng(key);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = spec_.lo_phase_noise_rms * rng.next();
            mixed[i] = trace.samples[i] * (lo_cos_[i] * std::cos(d) - lo_sin_[i] * std::sin(d));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) mixed[i] = trace.samples[i] * lo_cos_[i];
    }
    auto filtered = chain_.empty() ? mixed : FilterChain::apply_response(response_, mixed);

    PhotocurrentTrace out{{}, out_grid_, trace.scheme, trace.frame_index};
    if (spec_.decimation == 1) {
        out.samples = std::move(filtered);
    } else {
        out.samples.resize(out_grid_.n_samples);
        for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] = filtered[i * spec_.decimation];
    }
    return out;
}

PhotocurrentTrace demodulate(const PhotocurrentTrace& trace, double lo_freq, double lo_phase) {
    DemodSpec spec;
    spec.lo_freq = lo_freq;
    spec.lo_phase = lo_phase;
    return Demodulator(spec, trace.grid)(trace);
}

double lo_phase_noise_rms(double e1, double e2, double efficiency, double rel) {
    if (rel <= 0.0 || e1 == 0.0 || e2 == 0.0) return 0.0;
    // baseband gets the phase noise directly plus its image at twice the LO
    return std::sqrt(rel * 4.0 * (e1 * e1 + e2 * e2) / (3.0 * efficiency * e1 * e1 * e2 * e2));
}

}  // namespace sqhet
