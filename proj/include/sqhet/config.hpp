#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqhet/analytic.hpp"
#include "sqhet/filters.hpp"
#include "sqhet/grid.hpp"
#include "sqhet/spectrum.hpp"

namespace sqhet {

enum class ExperimentKind { spectrum, epr_identity, pump_sweep };
enum class Measurement { raw, demod, demod_no_cross };

std::string to_string(ExperimentKind k);
std::string to_string(Measurement m);

struct SqueezerConfig {
    double pump_ratio = 0.0;
    double hwhm = 30e6;
    double escape_efficiency = 1.0;
};

struct PickoffConfig {
    double reflectivity = 0.97;
    std::optional<SqueezerConfig> squeezer;
    double angle_error = 0.0;  ///< offset from the matched squeezing angle [rad]
    double jitter_rms = 0.0;   ///< per-frame Gaussian angle jitter [rad]
};

/// Beam 1 sits at w0, beam 2 at w0 + beat_freq. The sinusoidal modulation is
/// applied to beam 1, classical phase noise to beam 2.
struct BeamsConfig {
    double e1 = 100.0;
    double e2 = 100.0;
    double beat_freq = 10e6;
    double mod_freq = 3.11e6;
    double mod_depth = 0.0;
    double classical_fraction = 0.0;
    double phase1 = 0.0;
    double phase2 = 0.0;
};

struct DetectorConfig {
    double quantum_efficiency = 1.0;
    std::optional<double> electronic_noise_rel_db;
    std::optional<double> clip_level;
    double gain_ripple_db = 0.0;
};

struct DspConfig {
    std::vector<FilterSpec> raw_chain = default_raw_chain();
    std::vector<FilterSpec> demod_chain = default_demod_chain();
    /// Noise added independently after the power splitter, relative to the
    /// demodulated shot floor. Realized as LO phase noise per channel.
    std::optional<double> post_splitter_noise_rel_db;
    std::size_t decimation = 1;
};

struct NamedBand {
    std::string name;
    BandSpec band;
};

struct EprConfig {
    std::vector<double> pump_ratios{0.0, 0.2, 0.4, 0.6};
    double hwhm = 30e6;
    std::size_t variance_frames = 50;
};

struct SweepConfig {
    std::vector<double> pump_mw{50.0, 100.0, 200.0, 300.0};
    double threshold_mw = 600.0;
    double hwhm = 30e6;
    double escape_efficiency = 0.8;
    BandSpec summary_band{2e6, 1e6, 0.0};
};

struct ExperimentConfig {
    std::string name;
    std::string description;
    ExperimentKind kind = ExperimentKind::spectrum;
    FrequencyGrid grid;
    std::size_t frames = 12500;
    BeamsConfig beams;
    std::array<PickoffConfig, 2> pickoffs;
    DetectorConfig detector;
    Scheme scheme = Scheme::proposed;
    Measurement measurement = Measurement::raw;
    DspConfig dsp;
    std::vector<NamedBand> bands;
    BandSpec normalization_band{6.89e6, 0.5e6, 0.04e6};
    std::uint64_t seed = 1;
    std::string output_dir;
    EprConfig epr;
    SweepConfig sweep;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

nlohmann::ordered_json to_json(const ExperimentConfig& c);

/// Strict parse: unknown keys and wrong types raise ConfigError with the
/// field path. Missing keys keep the defaults of ExperimentConfig.
ExperimentConfig config_from_json(const nlohmann::ordered_json& j);

/// RFC 7386 merge patch of `patch` onto the serialized `base`.
ExperimentConfig merge_config(const ExperimentConfig& base, const nlohmann::ordered_json& patch);

nlohmann::ordered_json read_json_file(const std::string& path);

/// FNV-1a 64 of the canonical serialization without output_dir, as hex.
std::string config_hash(const ExperimentConfig& c);

}  // namespace sqhet
