#pragma once

#include <array>
#include <string>

namespace sqhet {

/// Below-threshold OPO squeezer.
struct SqueezerSpec {
    double pump_ratio = 0.0;          ///< x = sqrt(P / P_th), in [0, 1)
    double hwhm = 30e6;               ///< cavity half width at half maximum [Hz]
    double escape_efficiency = 1.0;   ///< eta in [0, 1]
    double squeeze_angle = 0.0;       ///< quadrature angle with reduced noise [rad]
    double center_freq = 0.0;         ///< optical offset from w0 [Hz]

    void validate() const;
};

/// Squeezed / anti-squeezed noise power relative to vacuum.
struct QuadraturePowers {
    double squeezed = 1.0;
    double antisqueezed = 1.0;
};

/// Lorentzian spectrum of a below-threshold OPO at sideband offset `offset`:
///   S-(e) = 1 - eta 4x / ((1+x)^2 + (e/hwhm)^2)
///   S+(e) = 1 + eta 4x / ((1-x)^2 + (e/hwhm)^2)
/// Throws std::invalid_argument for x >= 1.
QuadraturePowers opo_squeezing_spectrum(const SqueezerSpec& spec, double offset);

double to_db(double linear);
double from_db(double db);

enum class Sideband { lower, upper, demod };

/// Squeezing levels of one source at the two analysis sidebands, in dB of
/// reduction (positive = below vacuum) and anti-squeezing in dB above vacuum.
struct SourceLevels {
    double s_lower_db = 0.0;
    double s_upper_db = 0.0;
    double a_lower_db = 0.0;
    double a_upper_db = 0.0;
};

/// Source 1 is read by beam 2 (weight E2^2), source 2 by beam 1 (weight E1^2).
struct SqueezingLevels {
    std::array<SourceLevels, 2> sources{};
    std::array<double, 2> weights{1.0, 1.0};
};

/// Expected shot-noise reduction [dB] from weight-averaged linear squeezing.
double predicted_reduction(const SqueezingLevels& levels, Sideband band);

/// Reduction [dB] with a classical noise fraction f of the reference floor:
///   -10 log10(f + (1 - f) s).
double classical_noise_limit(double classical_fraction, double squeezing_linear);

/// Effective squeezing with Gaussian squeezing-angle jitter, small-angle form:
///   s cos^2(theta) + a sin^2(theta).
double phase_jitter_penalty(double squeezing_linear, double antisqueezing_linear, double theta_rms);

/// Exact Gaussian average of s cos^2(d + j) + a sin^2(d + j), j ~ N(0, sigma^2).
double mean_quadrature_power(double squeezing_linear, double antisqueezing_linear, double static_offset,
                             double sigma);

/// Demodulated phase-noise floor of same-frequency squeezing, relative to
/// vacuum, for broadband squeezing s / anti-squeezing a: (3s + a) / 4.
double straightforward_phase_floor(double squeezing_linear, double antisqueezing_linear);

enum class Scheme { proposed, straightforward, unsqueezed };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

/// Closed-form relative floor (target / reference, linear power) with its
/// constituents. Terms sum to `floor`.
struct NoiseBudget {
    Scheme scheme = Scheme::proposed;
    double floor = 1.0;
    double squeezed = 0.0;        ///< squeezed-quadrature contribution
    double antisqueezed = 0.0;    ///< anti-squeezed leakage (angle error, folding)
    double loss_vacuum = 0.0;     ///< vacuum admitted by pickoff and detector loss
    double classical = 0.0;       ///< laser phase noise
    double electronic = 0.0;      ///< unsubtracted independent readout noise

    [[nodiscard]] double reduction_db() const { return -to_db(floor); }
};

/// One squeezed source as seen by the detector at one analysis frequency.
struct SourceTerm {
    double weight = 1.0;          ///< E^2 of the beam that reads this source
    QuadraturePowers powers;      ///< squeezer output at the sideband offset
    double efficiency = 1.0;      ///< pickoff R x detector efficiency
    double angle_error = 0.0;     ///< static squeezing-angle mismatch [rad]
    double jitter_rms = 0.0;      ///< Gaussian per-frame angle jitter [rad]
};

/// Proposed scheme: each source's measured quadrature mixes S- and S+ by the
/// angle error, then loss admits vacuum. Classical noise is a fraction of the
/// reference floor; `independent_rel` is extra noise present in both target
/// and reference (relative to the unsqueezed shot floor) that background
/// subtraction does not remove.
NoiseBudget proposed_budget(const std::array<SourceTerm, 2>& sources, double classical_fraction,
                            double independent_rel = 0.0);

/// Same-frequency scheme, demodulated phase floor with broadband squeezing.
NoiseBudget straightforward_budget(const std::array<SourceTerm, 2>& sources, double classical_fraction,
                                   double independent_rel = 0.0);

}  // namespace sqhet
