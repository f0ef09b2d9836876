#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "sqhet/trace.hpp"

namespace sqhet {

enum class FilterKind { band_stop, low_pass, high_pass, gain };

std::string to_string(FilterKind k);
FilterKind filter_kind_from_string(const std::string& s);

/// One analog stage emulated digitally. A positive `ripple_db` selects a
/// Chebyshev-I prototype, otherwise Butterworth. Band-stop uses both
/// corners (passband edges), low/high-pass only `corners[0]`.
struct FilterSpec {
    FilterKind kind = FilterKind::gain;
    std::array<double, 2> corners{0.0, 0.0};  ///< [Hz]
    int order = 1;
    double ripple_db = 0.0;
    double gain_db = 0.0;

    /// Throws BandError when a corner is not strictly inside (0, fs/2).
    void validate(double sample_rate) const;
};

/// Second-order section, b0 + b1 z^-1 + b2 z^-2 over 1 + a1 z^-1 + a2 z^-2.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

/// Cascade of bilinear-transformed IIR stages.
///
/// Frames produced by the simulator are periodic, so `apply` filters
/// circularly in the frequency domain, which equals the steady-state output
/// of the recursive filter. `apply_recursive` runs the biquad cascade in
/// the time domain (with its start-up transient).
class FilterChain {
public:
    FilterChain() = default;
    FilterChain(std::vector<FilterSpec> specs, double sample_rate);

    [[nodiscard]] std::complex<double> response(double freq) const;
    [[nodiscard]] double power_response(double freq) const { return std::norm(response(freq)); }

    /// H at the n FFT bins of a length-n frame (signed frequencies).
    [[nodiscard]] std::vector<std::complex<double>> bin_response(std::size_t n) const;

    [[nodiscard]] std::vector<double> apply(std::span<const double> x) const;
    [[nodiscard]] PhotocurrentTrace apply(const PhotocurrentTrace& trace) const;
    [[nodiscard]] std::vector<double> apply_recursive(std::span<const double> x) const;

    [[nodiscard]] const std::vector<FilterSpec>& specs() const { return specs_; }
    [[nodiscard]] const std::vector<Biquad>& sections() const { return sections_; }
    [[nodiscard]] double sample_rate() const { return sample_rate_; }
    [[nodiscard]] bool empty() const { return specs_.empty(); }

    /// Circular filtering with a precomputed bin_response().
    static std::vector<double> apply_response(std::span<const std::complex<double>> h, std::span<const double> x);

private:
    struct Stage {
        std::vector<std::complex<double>> zeros;
        std::vector<std::complex<double>> poles;
        double gain = 1.0;
    };

    std::vector<FilterSpec> specs_;
    double sample_rate_ = 0.0;
    std::vector<Stage> stages_;
    std::vector<Biquad> sections_;
};

/// Convenience wrapper matching the free-function form of the chain.
PhotocurrentTrace apply_filter_chain(const PhotocurrentTrace& trace, const std::vector<FilterSpec>& chain);

/// Raw-signal chain: 1.2 MHz high-pass, 10 MHz band-stop, 15 MHz low-pass,
/// 20 dB gain.
std::vector<FilterSpec> default_raw_chain();

/// Post-mixer chain: 5 MHz 8th-order low-pass, 1.2 MHz high-pass, 20 dB.
std::vector<FilterSpec> default_demod_chain();

}  // namespace sqhet
