#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sqhet/filters.hpp"
#include "sqhet/trace.hpp"

namespace sqhet {

enum class SpectrumKind { auto_psd, cross };

/// One-sided averaged (cross-)spectrum on bins 0 .. N/2.
///
/// Normalization: white input of variance s^2 estimates s^2 in every bin,
/// so a vacuum-normalized photocurrent reads directly in shot-noise units.
/// (2/N) * sum(values) over a peak gives the power of a sinusoid.
struct SpectrumEstimate {
    std::vector<double> freqs;
    std::vector<double> values;
    std::size_t n_frames = 0;
    std::size_t frame_length = 0;
    std::string window = "hamming";
    SpectrumKind kind = SpectrumKind::auto_psd;
    bool compensated = false;
    bool background_subtracted = false;
};

/// Periodic Hamming window 0.54 - 0.46 cos(2 pi n / N).
std::vector<double> hamming_window(std::size_t n);

/// 1 + 2 sum_j rho_j, where rho_j is the squared correlation between two
/// periodogram bins j apart under the window. Inflates band-mean variances.
double window_correlation_factor(std::size_t n);

/// Order-sensitive frame accumulator. Periodograms may be computed in any
/// order or thread, but must be added in frame-index order.
class SpectrumAccumulator {
public:
    SpectrumAccumulator(std::size_t frame_length, double sample_rate, SpectrumKind kind);

    /// |X_k|^2 / sum(w^2) of one DC-removed, windowed frame.
    [[nodiscard]] std::vector<double> periodogram(std::span<const double> frame) const;
    /// Re(X1_k conj(X2_k)) / sum(w^2).
    [[nodiscard]] std::vector<double> cross_periodogram(std::span<const double> a, std::span<const double> b) const;

    void add(std::span<const double> frame);
    void add(std::span<const double> a, std::span<const double> b);
    void add_periodogram(std::span<const double> p);

    [[nodiscard]] std::size_t frames() const { return n_frames_; }
    [[nodiscard]] SpectrumEstimate result() const;

private:
    std::size_t n_;
    double sample_rate_;
    SpectrumKind kind_;
    std::vector<double> window_;
    double window_power_;
    std::vector<double> sum_;
    std::size_t n_frames_ = 0;
};

SpectrumEstimate welch_psd(std::span<const PhotocurrentTrace> frames);
SpectrumEstimate cross_spectrum(std::span<const PhotocurrentTrace> v1, std::span<const PhotocurrentTrace> v2);

/// Divides by |H(f)|^2 of the chain. Throws if already compensated.
SpectrumEstimate compensate(const SpectrumEstimate& s, const FilterChain& chain);

/// Frequencies within `half_width` of `center`, minus the central
/// +-`exclusion_half_width`.
struct BandSpec {
    double center = 0.0;
    double half_width = 0.0;
    double exclusion_half_width = 0.0;

    void validate() const;
};

std::vector<std::size_t> band_bins(const SpectrumEstimate& s, const BandSpec& band);
double band_mean(const SpectrumEstimate& s, const BandSpec& band);

/// Pointwise target - background; sets background_subtracted.
SpectrumEstimate subtract_background(const SpectrumEstimate& s, const SpectrumEstimate& background);

struct Reduction {
    double reduction_db = 0.0;
    double std_error_db = 0.0;
    std::size_t n_bins = 0;
};

/// -10 log10(mean(target - background) / mean(reference - background)) over
/// the band. The standard error propagates the bin scatter of both means
/// (delta method, window-correlation corrected). Throws
/// DegenerateSubtraction if either subtracted mean is <= 0.
Reduction postprocess(const SpectrumEstimate& target, const SpectrumEstimate& reference,
                      const SpectrumEstimate& background, const BandSpec& band);

}  // namespace sqhet
