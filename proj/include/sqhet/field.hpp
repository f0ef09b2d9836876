#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "sqhet/analytic.hpp"
#include "sqhet/grid.hpp"
#include "sqhet/rng.hpp"

namespace sqhet {

/// Carrier-free quantum noise (plus optional classical carriers) of one beam
/// path, as complex frequency-bin amplitudes in FFT order.
///
/// Units: a vacuum bin has E|A_k|^2 = 1. The time-domain envelope is
/// c(t_n) = sqrt(2/N) sum_k A_k exp(+2 pi i k n / N), so any quadrature of a
/// vacuum field has unit variance and unit PSD (the shot-noise unit).
struct FieldRealization {
    FrequencyGrid grid;
    std::vector<std::complex<double>> amplitudes;
    std::string label;

    FieldRealization() = default;
    FieldRealization(FrequencyGrid g, std::string lbl);

    FieldRealization& operator+=(const FieldRealization& other);
    FieldRealization& operator*=(double scale);
    friend FieldRealization operator+(FieldRealization a, const FieldRealization& b) { return a += b; }
    friend FieldRealization operator*(double s, FieldRealization a) { return a *= s; }
};

/// Two-photon quadratures a1(t), a2(t) about `center_freq`, defined through
/// c(t) exp(-i w_c t) = a1(t) - i a2(t).
struct QuadraturePair {
    std::vector<double> a1;
    std::vector<double> a2;
    double center_freq = 0.0;
    FrequencyGrid grid;

    /// X_phi(t) = a1 cos(phi) - a2 sin(phi): the quadrature read by a carrier
    /// of phase phi at the center frequency.
    [[nodiscard]] std::vector<double> quadrature(double phi) const;
};

FieldRealization make_vacuum_field(const FrequencyGrid& grid, RngKey key);

/// Two-mode Gaussian transform pairing bins center +- e so that the quadrature
/// at `spec.squeeze_angle` has PSD S-(e) and its conjugate S+(e). The e = 0
/// and Nyquist bins pair with themselves. Exact identity for x = 0.
FieldRealization apply_squeezer(const FieldRealization& field, const SqueezerSpec& spec);

/// sqrt(eta) field + sqrt(1 - eta) fresh vacuum drawn from `key`.
FieldRealization apply_loss(const FieldRealization& field, double efficiency, RngKey key);

/// Multiplies the field by exp(i phase).
FieldRealization rotate(const FieldRealization& field, double phase);

/// Adds amplitude * exp(i (2 pi offset t + phase)) as a single-bin carrier.
void add_carrier(FieldRealization& field, double amplitude, double offset, double phase);

/// Adds amplitude * exp(i (2 pi offset t + phase(t))) for a sampled phase.
void add_carrier(FieldRealization& field, double amplitude, double offset, std::span<const double> phase);

std::vector<std::complex<double>> time_envelope(const FieldRealization& field);
FieldRealization from_time_envelope(const FrequencyGrid& grid, std::span<const std::complex<double>> envelope,
                                    std::string label);

/// Throws BandError if `center_freq` is off-grid or out of band.
QuadraturePair quadrature_series(const FieldRealization& field, double center_freq);

/// Both sides of 2 a1^{w0+W}(t) = (a2^{w0+2W} - a2^{w0}) sin Wt + (a1^{w0+2W} + a1^{w0}) cos Wt.
struct EprDecomposition {
    std::vector<double> lhs;              ///< 2 a1^{w0+W}(t)
    std::vector<double> phase_group;      ///< a2^{w0+2W} - a2^{w0}
    std::vector<double> amplitude_group;  ///< a1^{w0+2W} + a1^{w0}
    std::vector<double> rhs;
};

EprDecomposition epr_decomposition(const FieldRealization& field, double omega0, double beat);

/// max|lhs - rhs| / max|lhs|.
double epr_identity_residual(const FieldRealization& field, double omega0, double beat);

}  // namespace sqhet
