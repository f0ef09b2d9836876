#pragma once

#include <cstddef>
#include <vector>

namespace sqhet {

/// Uniform frame grid shared by optical fields and photocurrents.
///
/// Optical frequencies are always given as offsets from the reference
/// carrier w0 (beam 1). `center_offset` is the baseband frequency that w0
/// is placed at, so an offset `f` lives at baseband `f + center_offset`.
/// Baseband bins follow FFT order: bin k <-> k * df for k < N/2, else
/// (k - N) * df.
struct FrequencyGrid {
    double sample_rate = 125e6;
    std::size_t n_samples = 5000;
    double center_offset = -5e6;

    /// Throws BandError unless n_samples is even and >= 16 and the rates
    /// are positive and finite.
    void validate() const;

    [[nodiscard]] double bin_spacing() const { return sample_rate / static_cast<double>(n_samples); }
    [[nodiscard]] double nyquist() const { return 0.5 * sample_rate; }
    [[nodiscard]] double time(std::size_t n) const { return static_cast<double>(n) / sample_rate; }

    /// Signed baseband frequency of FFT bin k.
    [[nodiscard]] double baseband_frequency(std::size_t k) const;

    /// FFT bin holding the optical offset `offset`. Throws BandError when the
    /// offset is off-grid or not strictly inside (-fs/2, fs/2) at baseband.
    [[nodiscard]] std::size_t optical_bin(double offset) const;

    /// Same check for a plain baseband frequency (photocurrent side).
    [[nodiscard]] std::size_t baseband_bin(double freq) const;

    [[nodiscard]] bool contains_optical(double offset) const;

    friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;
};

}  // namespace sqhet
