#include "sqhet/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sqhet/errors.hpp"
#include "sqhet/fft.hpp"

namespace sqhet {

namespace {

using cplx = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// derive() tags; changing them changes every realization
enum : std::uint64_t {
    kTagSqueezerVacuum = 1,
    kTagPickoffVacuum = 2,
    kTagPhaseNoise = 3,
    kTagJitter = 4,
    kTagBeam1 = 11,
    kTagBeam2 = 12,
    kTagDetector = 20,
    kTagDetectorPlus = 21,
    kTagDetectorMinus = 22,
    kTagElectronic = 23,
};

// White noise of per-sample variance sigma^2, optionally with every
// component at |f| >= cutoff removed (the in-band PSD is unchanged).
std::vector<double> classical_phase_noise(const FrequencyGrid& grid, RngKey key, double sigma, double cutoff) {
    std::vector<double> noise(grid.n_samples);
    NormalStream rng(key.derive(kTagPhaseNoise));
    for (auto& v : noise) v = sigma * rng.next();
    if (cutoff <= 0.0 || cutoff >= grid.nyquist()) return noise;
    auto spec = fft::forward_real(noise);
    for (std::size_t k = 0; k < spec.size(); ++k)
        if (std::abs(grid.baseband_frequency(k)) >= cutoff) spec[k] = 0.0;
    return fft::backward_real(spec);
}

std::vector<double> phase_series(const FrequencyGrid& grid, const BeamSpec& beam, RngKey key, double sigma,
                                 double cutoff) {
    std::vector<double> phase(grid.n_samples, beam.static_phase);
    const auto& ps = beam.phase_signal;
    if (ps.mod_depth != 0.0)
        for (std::size_t n = 0; n < phase.size(); ++n)
            phase[n] += ps.mod_depth * std::sin(kTwoPi * ps.mod_freq * grid.time(n));
    if (sigma > 0.0) {
        const auto noise = classical_phase_noise(grid, key, sigma, cutoff);
        for (std::size_t n = 0; n < phase.size(); ++n) phase[n] += noise[n];
    }
    return phase;
}

bool phase_is_static(const BeamSpec& beam, double sigma) { return beam.phase_signal.mod_depth == 0.0 && sigma <= 0.0; }

FieldRealization compose_noise(const FrequencyGrid& grid, const PickoffSpec& pickoff, RngKey key) {
    FieldRealization injected = make_vacuum_field(grid, key.derive(kTagSqueezerVacuum));
    if (pickoff.squeezer) injected = apply_squeezer(injected, *pickoff.squeezer);
    double angle = pickoff.injection_phase;
    if (pickoff.jitter_rms > 0.0) {
        NormalStream rng(key.derive(kTagJitter));
        angle += pickoff.jitter_rms * rng.next();
    }
    injected = rotate(injected, angle);
    const double r = pickoff.reflectivity;
    if (r == 1.0) return injected;
    FieldRealization own = make_vacuum_field(grid, key.derive(kTagPickoffVacuum));
    FieldRealization out = std::sqrt(r) * std::move(injected);
    out += std::sqrt(1.0 - r) * std::move(own);
    return out;
}

RngKey beam_key(RngKey key, std::size_t i) { return key.derive(i == 0 ? kTagBeam1 : kTagBeam2); }

double beam_sigma(const InterferometerSetup& setup, std::size_t i) { return i == 1 ? setup.classical_sigma() : 0.0; }

// Band-limited time samples of a field on a grid with `factor`x the rate.
std::vector<cplx> oversampled_envelope(const FieldRealization& f, std::size_t factor) {
    const std::size_t n = f.grid.n_samples;
    const std::size_t m = n * factor;
    std::vector<cplx> padded(m);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t dst = k < n / 2 ? k : k + m - n;
        padded[dst] = f.amplitudes[k];
    }
    auto c = fft::backward(padded);
    const double scale = std::sqrt(2.0 / static_cast<double>(n));
    for (auto& v : c) v *= scale;
    return c;
}

}  // namespace

void PhaseSignalSpec::validate() const {
    if (!(classical_fraction >= 0.0 && classical_fraction < 1.0))
        throw std::invalid_argument("phase signal: classical_fraction must be in [0, 1)");
    if (!std::isfinite(mod_depth) || !std::isfinite(mod_freq) || mod_freq < 0.0)
        throw std::invalid_argument("phase signal: modulation must be finite with mod_freq >= 0");
}

void BeamSpec::validate() const {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw std::invalid_argument("beam: amplitude must be >= 0");
    phase_signal.validate();
}

void PickoffSpec::validate(const FrequencyGrid& grid) const {
    if (!(reflectivity > 0.0 && reflectivity <= 1.0))
        throw std::invalid_argument("pickoff: reflectivity must be in (0, 1]");
    if (!(jitter_rms >= 0.0)) throw std::invalid_argument("pickoff: jitter_rms must be >= 0");
    if (squeezer) {
        squeezer->validate();
        static_cast<void>(grid.optical_bin(squeezer->center_freq));
    }
}

void DetectorSpec::validate() const {
    if (!(quantum_efficiency > 0.0 && quantum_efficiency <= 1.0))
        throw std::invalid_argument("detector: quantum_efficiency must be in (0, 1]");
    if (clip_level && !(*clip_level > 0.0)) throw std::invalid_argument("detector: clip_level must be > 0");
    if (electronic_noise_rel_db && !(reference_floor > 0.0))
        throw std::invalid_argument("detector: electronic noise needs a positive reference_floor");
    if (!std::isfinite(gain_ripple_db)) throw std::invalid_argument("detector: gain_ripple_db must be finite");
}

double unsqueezed_shot_floor(double e1, double e2, double efficiency) {
    return 4.0 * efficiency * (e1 * e1 + e2 * e2);
}

double classical_phase_sigma(double e1, double e2, double efficiency, double classical_fraction) {
    if (classical_fraction <= 0.0 || e1 == 0.0 || e2 == 0.0) return 0.0;
    const double ratio = classical_fraction / (1.0 - classical_fraction);
    return std::sqrt(ratio * 2.0 * (e1 * e1 + e2 * e2) / (efficiency * e1 * e1 * e2 * e2));
}

double raw_classical_fraction(double classical_fraction) {
    const double half = 0.5 * classical_fraction / (1.0 - classical_fraction);
    return half / (1.0 + half);
}

double gain_ripple_db_at(double ripple_db, double freq) {
    const double f = std::clamp(std::abs(freq), 5e6, 15e6);
    return 0.5 * ripple_db * std::cos(std::numbers::pi * (f - 5e6) / 10e6);
}

FieldRealization compose_beam(const FrequencyGrid& grid, const BeamSpec& beam, const PickoffSpec& pickoff,
                              RngKey key, double classical_sigma, double classical_cutoff) {
    grid.validate();
    beam.validate();
    pickoff.validate(grid);
    FieldRealization out = compose_noise(grid, pickoff, key);
    if (beam.amplitude > 0.0) {
        if (phase_is_static(beam, classical_sigma))
            add_carrier(out, beam.amplitude, beam.carrier_freq, beam.static_phase);
        else
            add_carrier(out, beam.amplitude, beam.carrier_freq,
                        phase_series(grid, beam, key, classical_sigma, classical_cutoff));
    }
    out.label = "beam";
    return out;
}

PhotocurrentTrace balanced_detect(const FieldRealization& e1, const FieldRealization& e2, const DetectorSpec& det,
                                  RngKey key) {
    if (!(e1.grid == e2.grid)) throw BandError("balanced_detect: field grids differ");
    det.validate();
    const FrequencyGrid& g = e1.grid;
    const std::size_t n = g.n_samples;
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

    FieldRealization plus(g, "E+"), minus(g, "E-");
    for (std::size_t k = 0; k < n; ++k) {
        plus.amplitudes[k] = (e1.amplitudes[k] + e2.amplitudes[k]) * inv_sqrt2;
        minus.amplitudes[k] = (e1.amplitudes[k] - e2.amplitudes[k]) * inv_sqrt2;
    }
    const RngKey dkey = key.derive(kTagDetector);
    plus = apply_loss(plus, det.quantum_efficiency, dkey.derive(kTagDetectorPlus));
    minus = apply_loss(minus, det.quantum_efficiency, dkey.derive(kTagDetectorMinus));

    const auto cp = oversampled_envelope(plus, 2);
    const auto cm = oversampled_envelope(minus, 2);
    std::vector<cplx> power(cp.size());
    for (std::size_t m = 0; m < cp.size(); ++m) power[m] = std::norm(cp[m]) - std::norm(cm[m]);
    const auto spec2 = fft::forward(power);

    // keep |f| < fs/2, drop the Nyquist bin, apply the detector response
    std::vector<cplx> spec(n);
    for (std::size_t k = 0; k < n / 2; ++k) spec[k] = spec2[k];
    for (std::size_t k = n / 2 + 1; k < n; ++k) spec[k] = spec2[k + n];
    if (det.gain_ripple_db != 0.0)
        for (std::size_t k = 0; k < n; ++k)
            spec[k] *= std::pow(10.0, gain_ripple_db_at(det.gain_ripple_db, g.baseband_frequency(k)) / 20.0);
    auto samples = fft::backward_real(spec);
    for (auto& s : samples) s *= 0.5;

    if (det.electronic_noise_rel_db) {
        const double sigma = std::sqrt(det.reference_floor * from_db(*det.electronic_noise_rel_db));
        NormalStream rng(dkey.derive(kTagElectronic));
        for (auto& s : samples) s += sigma * rng.next();
    }
    if (det.clip_level)
        for (auto& s : samples) s = std::clamp(s, -*det.clip_level, *det.clip_level);
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(n);
    for (auto& s : samples) s -= mean;
    return {std::move(samples), g, Scheme::unsqueezed, 0};
}

void InterferometerSetup::validate() const {
    grid.validate();
    for (const auto& b : beams) {
        b.validate();
        static_cast<void>(grid.optical_bin(b.carrier_freq));
    }
    for (const auto& p : pickoffs) p.validate(grid);
    detector.validate();
}

double InterferometerSetup::classical_sigma() const {
    return classical_phase_sigma(beams[0].amplitude, beams[1].amplitude, detector.quantum_efficiency,
                                 beams[1].phase_signal.classical_fraction);
}

std::array<PickoffSpec, 2> proposed_pickoffs(const std::array<BeamSpec, 2>& beams,
                                             const std::array<std::optional<SqueezerSpec>, 2>& squeezers,
                                             double reflectivity) {
    std::array<PickoffSpec, 2> out;
    for (std::size_t i = 0; i < 2; ++i) {
        const BeamSpec& reader = beams[1 - i];
        out[i].reflectivity = reflectivity;
        out[i].injection_phase = reader.static_phase;
        if (squeezers[i]) {
            SqueezerSpec s = *squeezers[i];
            s.center_freq = reader.carrier_freq;
            s.squeeze_angle = 0.0;
            out[i].squeezer = s;
        }
    }
    return out;
}

std::array<PickoffSpec, 2> straightforward_pickoffs(const std::array<BeamSpec, 2>& beams,
                                                    const std::array<std::optional<SqueezerSpec>, 2>& squeezers,
                                                    double reflectivity) {
    std::array<PickoffSpec, 2> out;
    for (std::size_t i = 0; i < 2; ++i) {
        out[i].reflectivity = reflectivity;
        out[i].injection_phase = beams[i].static_phase;
        if (squeezers[i]) {
            SqueezerSpec s = *squeezers[i];
            s.center_freq = beams[i].carrier_freq;
            s.squeeze_angle = 0.5 * std::numbers::pi;
            out[i].squeezer = s;
        }
    }
    return out;
}

std::array<FieldRealization, 2> compose_frame(const InterferometerSetup& setup, RngKey key) {
    const double cutoff = std::abs(setup.beat_freq());
    return {compose_beam(setup.grid, setup.beams[0], setup.pickoffs[0], beam_key(key, 0), beam_sigma(setup, 0),
                         cutoff),
            compose_beam(setup.grid, setup.beams[1], setup.pickoffs[1], beam_key(key, 1), beam_sigma(setup, 1),
                         cutoff)};
}

PhotocurrentTrace detect_frame(const InterferometerSetup& setup, RngKey key, std::size_t frame_index) {
    const auto fields = compose_frame(setup, key);
    auto trace = balanced_detect(fields[0], fields[1], setup.detector, key);
    trace.scheme = setup.scheme;
    trace.frame_index = frame_index;
    return trace;
}

PhotocurrentTrace linearized_output(const InterferometerSetup& setup, RngKey key, std::size_t frame_index) {
    setup.validate();
    const FrequencyGrid& g = setup.grid;
    const std::size_t n = g.n_samples;
    std::array<std::vector<double>, 2> phase;
    std::array<FieldRealization, 2> noise;
    for (std::size_t i = 0; i < 2; ++i) {
        const RngKey k = beam_key(key, i);
        phase[i] = phase_series(g, setup.beams[i], k, beam_sigma(setup, i), std::abs(setup.beat_freq()));
        noise[i] = compose_noise(g, setup.pickoffs[i], k);
    }
    const double e1 = setup.beams[0].amplitude, e2 = setup.beams[1].amplitude;
    // beam 2's carrier reads noise 1 about its own frequency, and vice versa
    const auto q1 = quadrature_series(noise[0], setup.beams[1].carrier_freq);
    const auto q2 = quadrature_series(noise[1], setup.beams[0].carrier_freq);
    const double beat = setup.beat_freq();

    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double th1 = phase[0][t], th2 = phase[1][t];
        const double classical = e1 * e2 * std::cos(kTwoPi * beat * g.time(t) + th2 - th1);
        const double xa = q1.a1[t] * std::cos(th2) - q1.a2[t] * std::sin(th2);
        const double xb = q2.a1[t] * std::cos(th1) - q2.a2[t] * std::sin(th1);
        out[t] = 2.0 * (classical + e2 * xa + e1 * xb);
    }
    double mean = 0.0;
    for (double s : out) mean += s;
    mean /= static_cast<double>(n);
    for (auto& s : out) s -= mean;
    return {std::move(out), g, setup.scheme, frame_index};
}

PhotocurrentTrace straightforward_variant(const InterferometerSetup& setup, RngKey key, std::size_t frame_index) {
    InterferometerSetup s = setup;
    std::array<std::optional<SqueezerSpec>, 2> squeezers{setup.pickoffs[0].squeezer, setup.pickoffs[1].squeezer};
    const auto jitter = std::array{setup.pickoffs[0].jitter_rms, setup.pickoffs[1].jitter_rms};
    s.pickoffs = straightforward_pickoffs(setup.beams, squeezers, setup.pickoffs[0].reflectivity);
    for (std::size_t i = 0; i < 2; ++i) {
        s.pickoffs[i].reflectivity = setup.pickoffs[i].reflectivity;
        s.pickoffs[i].jitter_rms = jitter[i];
    }
    s.scheme = Scheme::straightforward;
    return linearized_output(s, key, frame_index);
}

}  // namespace sqhet
