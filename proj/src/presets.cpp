#include "sqhet/presets.hpp"

#include <cmath>

#include "sqhet/errors.hpp"

namespace sqhet {

namespace {

// Total squeezing efficiency 0.8: pickoff 0.97 x detector 0.99 x escape.
constexpr double kReflectivity = 0.97;
constexpr double kDetectorEfficiency = 0.99;
constexpr double kTotalEfficiency = 0.8;
constexpr double kThresholdMw = 600.0;

const BandSpec kLowerBand{6.89e6, 0.5e6, 0.04e6};
const BandSpec kUpperBand{13.11e6, 0.5e6, 0.04e6};
const BandSpec kDemodBand{3.11e6, 0.5e6, 0.05e6};

SqueezerConfig opo(double pump_mw) {
    return {std::sqrt(pump_mw / kThresholdMw), 30e6, kTotalEfficiency / (kReflectivity * kDetectorEfficiency)};
}

ExperimentConfig lab_setup() {
    ExperimentConfig c;
    c.frames = 12500;
    c.beams.e1 = 100.0;
    c.beams.e2 = 100.0;
    c.beams.beat_freq = 10e6;
    c.beams.mod_freq = 3.11e6;
    c.beams.mod_depth = 0.009;
    c.beams.classical_fraction = 0.1;
    c.beams.phase1 = 0.3;
    c.beams.phase2 = 1.1;
    c.pickoffs[0] = {kReflectivity, opo(90.0), 0.0, 0.0};
    c.pickoffs[1] = {kReflectivity, opo(80.0), 0.0, 0.0};
    c.detector.quantum_efficiency = kDetectorEfficiency;
    c.detector.electronic_noise_rel_db = -2.0;
    c.detector.gain_ripple_db = 0.5;
    c.seed = 1729;
    return c;
}

ExperimentConfig fig3_raw() {
    ExperimentConfig c = lab_setup();
    c.name = "fig3-raw";
    c.description = "Raw beat spectrum, proposed scheme; lower and upper sideband reductions";
    c.measurement = Measurement::raw;
    c.bands = {{"lower", kLowerBand}, {"upper", kUpperBand}};
    c.normalization_band = kLowerBand;
    return c;
}

ExperimentConfig fig4_demod() {
    ExperimentConfig c = lab_setup();
    c.name = "fig4-demod";
    c.description = "Phase-demodulated cross-spectrum, proposed scheme";
    c.measurement = Measurement::demod;
    c.dsp.post_splitter_noise_rel_db = -2.0;
    c.bands = {{"demod", kDemodBand}};
    c.normalization_band = kDemodBand;
    return c;
}

ExperimentConfig no_cross() {
    ExperimentConfig c = fig4_demod();
    c.name = "appendixD-no-cross";
    c.description = "As fig4-demod but with a single-channel auto-spectrum instead of the cross-spectrum";
    c.measurement = Measurement::demod_no_cross;
    return c;
}

ExperimentConfig straightforward() {
    ExperimentConfig c = lab_setup();
    c.name = "appendixG-straightforward";
    c.description = "Same-frequency squeezing on each beam, demodulated phase floor (broadband squeezing)";
    c.scheme = Scheme::straightforward;
    c.measurement = Measurement::demod;
    c.beams.classical_fraction = 0.0;
    for (auto& p : c.pickoffs) {
        p.reflectivity = 1.0;
        p.squeezer = SqueezerConfig{std::sqrt(90.0 / kThresholdMw), 1e12, kTotalEfficiency};
    }
    c.detector = DetectorConfig{1.0, std::nullopt, std::nullopt, 0.0};
    c.bands = {{"demod", kDemodBand}};
    c.normalization_band = kDemodBand;
    return c;
}

ExperimentConfig vacuum_selftest() {
    ExperimentConfig c = fig4_demod();
    c.name = "vacuum-selftest";
    c.description = "Squeezers off in the target run; the reduction must vanish";
    c.scheme = Scheme::unsqueezed;
    c.frames = 2000;
    return c;
}

ExperimentConfig epr_identity() {
    ExperimentConfig c = lab_setup();
    c.name = "epr-identity";
    c.description = "Sideband-quadrature identity on random states, grouped-term variances vs pump";
    c.kind = ExperimentKind::epr_identity;
    c.frames = 100;
    return c;
}

ExperimentConfig pump_sweep() {
    ExperimentConfig c = lab_setup();
    c.name = "appendixE-pump-sweep";
    c.description = "OPO squeezing / anti-squeezing spectra at 50, 100, 200, 300 mW pump";
    c.kind = ExperimentKind::pump_sweep;
    c.frames = 400;
    return c;
}

struct Entry {
    const char* name;
    ExperimentConfig (*make)();
};

const Entry kPresets[] = {
    {"fig3-raw", fig3_raw},
    {"fig4-demod", fig4_demod},
    {"appendixD-no-cross", no_cross},
    {"appendixG-straightforward", straightforward},
    {"epr-identity", epr_identity},
    {"appendixE-pump-sweep", pump_sweep},
    {"vacuum-selftest", vacuum_selftest},
};

}  // namespace

std::vector<PresetInfo> list_presets() {
    std::vector<PresetInfo> out;
    for (const auto& e : kPresets) out.push_back({e.name, e.make().description});
    return out;
}

ExperimentConfig make_preset(const std::string& name) {
    for (const auto& e : kPresets) {
        if (name == e.name) {
            ExperimentConfig c = e.make();
            c.output_dir = "out/" + name;
            c.validate();
            return c;
        }
    }
    throw ConfigError("preset", "unknown preset '" + name + "'");
}

}  // namespace sqhet
