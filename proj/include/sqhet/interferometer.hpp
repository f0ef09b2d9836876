#pragma once

#include <array>
#include <optional>
#include <vector>

#include "sqhet/field.hpp"
#include "sqhet/trace.hpp"

namespace sqhet {

/// Phase signal theta(t) carried by a beam: an optional sinusoidal
/// modulation plus optional white classical phase noise. The noise level is
/// given as the fraction of the unsqueezed floor it contributes; the
/// interferometer converts it to an rms phase from both beam amplitudes.
struct PhaseSignalSpec {
    double mod_freq = 0.0;            ///< [Hz]
    double mod_depth = 0.0;           ///< [rad], 0 disables the sinusoid
    double classical_fraction = 0.0;  ///< in [0, 1)

    void validate() const;
};

struct BeamSpec {
    double amplitude = 0.0;        ///< E, sqrt(shot-noise quanta)
    double carrier_freq = 0.0;     ///< optical offset from w0 [Hz]
    PhaseSignalSpec phase_signal;
    double static_phase = 0.0;     ///< [rad]

    void validate() const;
};

/// High-reflectivity pickoff through which squeezed vacuum (or vacuum) is
/// injected. The squeezed field is rotated by `injection_phase`
/// (theta_a / theta_b) plus a per-frame Gaussian jitter.
struct PickoffSpec {
    double reflectivity = 1.0;
    std::optional<SqueezerSpec> squeezer;
    double injection_phase = 0.0;
    double jitter_rms = 0.0;

    void validate(const FrequencyGrid& grid) const;
};

struct DetectorSpec {
    double quantum_efficiency = 1.0;
    std::optional<double> electronic_noise_rel_db;  ///< relative to reference_floor
    double reference_floor = 0.0;                   ///< absolute PSD the dB figure refers to
    std::optional<double> clip_level;
    double gain_ripple_db = 0.0;

    void validate() const;
};

/// Unsqueezed shot-noise PSD of the balanced output: 4 eta (E1^2 + E2^2).
double unsqueezed_shot_floor(double e1, double e2, double efficiency);

/// Per-sample rms of the phase noise on theta2 - theta1 that contributes
/// `classical_fraction` of the demodulated phase-quadrature floor (shot +
/// classical). The setup limits this noise to |f| below the beat frequency,
/// so the raw (amplitude + phase) spectrum sees half the excess.
double classical_phase_sigma(double e1, double e2, double efficiency, double classical_fraction);

/// Classical fraction seen by the raw measurement when `classical_fraction`
/// is the phase-quadrature value: excess C = f / (1 - f) is halved.
double raw_classical_fraction(double classical_fraction);

/// Detector response: +-ripple/2 dB cosine across 5-15 MHz, flat outside.
double gain_ripple_db_at(double ripple_db, double freq);

/// Builds one beam: carrier on top of sqrt(R) (squeezed) vacuum plus
/// sqrt(1 - R) fresh vacuum. `classical_sigma` adds phase noise that is
/// white below `classical_cutoff` (0: white up to Nyquist).
FieldRealization compose_beam(const FrequencyGrid& grid, const BeamSpec& beam, const PickoffSpec& pickoff,
                              RngKey key, double classical_sigma = 0.0, double classical_cutoff = 0.0);

/// Exact product detection dP = |E+|^2 - |E-|^2 evaluated on a 2x
/// oversampled grid and band-limited to (-fs/2, fs/2), followed by detector
/// loss, gain ripple, electronic noise, clipping and DC removal.
PhotocurrentTrace balanced_detect(const FieldRealization& e1, const FieldRealization& e2, const DetectorSpec& det,
                                  RngKey key);

/// Everything one frame of the optical setup needs.
struct InterferometerSetup {
    FrequencyGrid grid;
    std::array<BeamSpec, 2> beams;
    std::array<PickoffSpec, 2> pickoffs;
    DetectorSpec detector;
    Scheme scheme = Scheme::proposed;

    void validate() const;
    [[nodiscard]] double classical_sigma() const;
    [[nodiscard]] double beat_freq() const { return beams[1].carrier_freq - beams[0].carrier_freq; }
};

/// Pickoffs for the proposed scheme: squeezer k is centered on the other
/// beam's carrier and its squeezed quadrature is aligned with that carrier.
std::array<PickoffSpec, 2> proposed_pickoffs(const std::array<BeamSpec, 2>& beams,
                                             const std::array<std::optional<SqueezerSpec>, 2>& squeezers,
                                             double reflectivity);

/// Pickoffs for the same-frequency scheme: each squeezer is centered on its
/// own carrier and squeezes that carrier's phase quadrature.
std::array<PickoffSpec, 2> straightforward_pickoffs(const std::array<BeamSpec, 2>& beams,
                                                    const std::array<std::optional<SqueezerSpec>, 2>& squeezers,
                                                    double reflectivity);

std::array<FieldRealization, 2> compose_frame(const InterferometerSetup& setup, RngKey key);

PhotocurrentTrace detect_frame(const InterferometerSetup& setup, RngKey key, std::size_t frame_index = 0);

/// First-order output
///   2[E1E2 cos(Wt + theta) + E2 X^{a}_{theta2(t)} + E1 X^{b}_{theta1(t)}]
/// built from the same noise realizations as detect_frame (ideal detector).
PhotocurrentTrace linearized_output(const InterferometerSetup& setup, RngKey key, std::size_t frame_index = 0);

/// linearized_output after re-centering each squeezer on its own carrier.
PhotocurrentTrace straightforward_variant(const InterferometerSetup& setup, RngKey key, std::size_t frame_index = 0);

}  // namespace sqhet
