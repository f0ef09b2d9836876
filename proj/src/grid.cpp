#include "sqhet/grid.hpp"

#include <cmath>
#include <string>

#include "sqhet/errors.hpp"

namespace sqhet {

void FrequencyGrid::validate() const {
    if (n_samples < 16 || n_samples % 2 != 0)
        throw BandError("grid: n_samples must be even and >= 16, got " + std::to_string(n_samples));
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) throw BandError("grid: sample_rate must be > 0");
    if (!std::isfinite(center_offset) || std::abs(center_offset) >= nyquist())
        throw BandError("grid: center_offset must lie inside (-fs/2, fs/2)");
}

double FrequencyGrid::baseband_frequency(std::size_t k) const {
    const auto n = static_cast<long long>(n_samples);
    auto i = static_cast<long long>(k);
    if (i >= n / 2) i -= n;
    return static_cast<double>(i) * bin_spacing();
}

std::size_t FrequencyGrid::baseband_bin(double freq) const {
    if (!(std::abs(freq) < nyquist()))
        throw BandError("frequency " + std::to_string(freq) + " Hz is outside (-fs/2, fs/2)");
    const double pos = freq / bin_spacing();
    const double r = std::round(pos);
    if (std::abs(pos - r) > 1e-6)
        throw BandError("frequency " + std::to_string(freq) + " Hz is not on the " + std::to_string(bin_spacing()) +
                        " Hz grid");
    auto i = static_cast<long long>(r);
    if (i < 0) i += static_cast<long long>(n_samples);
    return static_cast<std::size_t>(i);
}

std::size_t FrequencyGrid::optical_bin(double offset) const { return baseband_bin(offset + center_offset); }

bool FrequencyGrid::contains_optical(double offset) const {
    return std::abs(offset + center_offset) < nyquist();
}

}  // namespace sqhet
