#include "sqhet/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "sqhet/errors.hpp"
#include "sqhet/fft.hpp"

namespace sqhet {

namespace {

void require_compatible(const SpectrumEstimate& a, const SpectrumEstimate& b) {
    if (a.freqs != b.freqs) throw BandError("spectra do not share a frequency axis");
}

}  // namespace

std::vector<double> hamming_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    return w;
}

double window_correlation_factor(std::size_t n) {
    const auto w = hamming_window(n);
    std::vector<std::complex<double>> w2(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w2[i] = w[i] * w[i];
        total += w[i] * w[i];
    }
    const auto c = fft::forward(w2);
    double kappa = 1.0;
    for (std::size_t j = 1; j <= n / 2; ++j) kappa += 2.0 * std::norm(c[j]) / (total * total);
    return kappa;
}

SpectrumAccumulator::SpectrumAccumulator(std::size_t frame_length, double sample_rate, SpectrumKind kind)
    : n_(frame_length), sample_rate_(sample_rate), kind_(kind), window_(hamming_window(frame_length)) {
    if (frame_length < 2 || frame_length % 2 != 0) throw BandError("spectrum: frame length must be even and >= 2");
    window_power_ = 0.0;
    for (double v : window_) window_power_ += v * v;
    sum_.assign(n_ / 2 + 1, 0.0);
}

std::vector<double> SpectrumAccumulator::periodogram(std::span<const double> frame) const {
    if (frame.size() != n_) throw BandError("spectrum: inconsistent frame length");
    double mean = 0.0;
    for (double v : frame) mean += v;
    mean /= static_cast<double>(n_);
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = (frame[i] - mean) * window_[i];
    const auto spec = fft::forward_real(x);
    std::vector<double> p(n_ / 2 + 1);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(spec[k]) / window_power_;
    return p;
}

std::vector<double> SpectrumAccumulator::cross_periodogram(std::span<const double> a, std::span<const double> b) const {
    if (a.size() != n_ || b.size() != n_) throw BandError("spectrum: misaligned frames");
    auto prep = [&](std::span<const double> f) {
        double mean = 0.0;
        for (double v : f) mean += v;
        mean /= static_cast<double>(n_);
        std::vector<double> x(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] = (f[i] - mean) * window_[i];
        return fft::forward_real(x);
    };
    const auto sa = prep(a);
    const auto sb = prep(b);
    std::vector<double> p(n_ / 2 + 1);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = (sa[k] * std::conj(sb[k])).real() / window_power_;
    return p;
}

void SpectrumAccumulator::add_periodogram(std::span<const double> p) {
    if (p.size() != sum_.size()) throw BandError("spectrum: periodogram length mismatch");
    for (std::size_t k = 0; k < p.size(); ++k) sum_[k] += p[k];
    ++n_frames_;
}

void SpectrumAccumulator::add(std::span<const double> frame) { add_periodogram(periodogram(frame)); }

void SpectrumAccumulator::add(std::span<const double> a, std::span<const double> b) {
    add_periodogram(cross_periodogram(a, b));
}

SpectrumEstimate SpectrumAccumulator::result() const {
    if (n_frames_ == 0) throw std::logic_error("spectrum: no frames accumulated");
    SpectrumEstimate s;
    s.kind = kind_;
    s.n_frames = n_frames_;
    s.frame_length = n_;
    s.freqs.resize(sum_.size());
    s.values.resize(sum_.size());
    const double df = sample_rate_ / static_cast<double>(n_);
    for (std::size_t k = 0; k < sum_.size(); ++k) {
        s.freqs[k] = static_cast<double>(k) * df;
        s.values[k] = sum_[k] / static_cast<double>(n_frames_);
    }
    return s;
}

SpectrumEstimate welch_psd(std::span<const PhotocurrentTrace> frames) {
    if (frames.empty()) throw std::invalid_argument("welch_psd: no frames");
    const auto& g = frames.front().grid;
    SpectrumAccumulator acc(frames.front().samples.size(), g.sample_rate, SpectrumKind::auto_psd);
    for (const auto& f : frames) acc.add(f.samples);
    return acc.result();
}

SpectrumEstimate cross_spectrum(std::span<const PhotocurrentTrace> v1, std::span<const PhotocurrentTrace> v2) {
    if (v1.empty() || v1.size() != v2.size()) throw BandError("cross_spectrum: frame streams are misaligned");
    const auto& g = v1.front().grid;
    SpectrumAccumulator acc(v1.front().samples.size(), g.sample_rate, SpectrumKind::cross);
    for (std::size_t i = 0; i < v1.size(); ++i) {
        if (v1[i].frame_index != v2[i].frame_index) throw BandError("cross_spectrum: frame indices differ");
        acc.add(v1[i].samples, v2[i].samples);
    }
    return acc.result();
}

SpectrumEstimate compensate(const SpectrumEstimate& s, const FilterChain& chain) {
    if (s.compensated) throw std::logic_error("spectrum is already compensated");
    SpectrumEstimate out = s;
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        const double h2 = chain.power_response(out.freqs[k]);
        out.values[k] = h2 > 0.0 ? out.values[k] / h2 : 0.0;
    }
    out.compensated = true;
    return out;
}

void BandSpec::validate() const {
    if (!(half_width > 0.0)) throw BandError("band: half_width must be > 0");
    if (!(exclusion_half_width >= 0.0 && exclusion_half_width < half_width))
        throw BandError("band: need 0 <= exclusion_half_width < half_width");
}

std::vector<std::size_t> band_bins(const SpectrumEstimate& s, const BandSpec& band) {
    band.validate();
    if (s.freqs.size() < 2) throw BandError("band: spectrum too short");
    const double tol = 1e-6 * (s.freqs[1] - s.freqs[0]);
    std::vector<std::size_t> bins;
    for (std::size_t k = 0; k < s.freqs.size(); ++k) {
        const double d = std::abs(s.freqs[k] - band.center);
        if (d <= band.half_width + tol && d > band.exclusion_half_width + tol) bins.push_back(k);
    }
    if (bins.empty()) throw BandError("band: no bins inside the band");
    return bins;
}

double band_mean(const SpectrumEstimate& s, const BandSpec& band) {
    const auto bins = band_bins(s, band);
    double sum = 0.0;
    for (auto k : bins) sum += s.values[k];
    return sum / static_cast<double>(bins.size());
}

SpectrumEstimate subtract_background(const SpectrumEstimate& s, const SpectrumEstimate& background) {
    require_compatible(s, background);
    if (s.background_subtracted || background.background_subtracted)
        throw std::logic_error("spectrum: background already subtracted");
    SpectrumEstimate out = s;
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] -= background.values[k];
    out.background_subtracted = true;
    return out;
}

Reduction postprocess(const SpectrumEstimate& target, const SpectrumEstimate& reference,
                      const SpectrumEstimate& background, const BandSpec& band) {
    require_compatible(target, reference);
    require_compatible(target, background);
    if (target.background_subtracted || reference.background_subtracted || background.background_subtracted)
        throw std::logic_error("postprocess: inputs must not be background-subtracted");
    const auto bins = band_bins(target, band);
    const double n = static_cast<double>(bins.size());
    double md = 0.0, me = 0.0;
    for (auto k : bins) {
        md += target.values[k] - background.values[k];
        me += reference.values[k] - background.values[k];
    }
    md /= n;
    me /= n;
    if (!(md > 0.0) || !(me > 0.0))
        throw DegenerateSubtraction("background-subtracted band mean is not positive; electronic noise dominates");

    double vd = 0.0, ve = 0.0, cde = 0.0;
    for (auto k : bins) {
        const double d = target.values[k] - background.values[k] - md;
        const double e = reference.values[k] - background.values[k] - me;
        vd += d * d;
        ve += e * e;
        cde += d * e;
    }
    Reduction r;
    r.n_bins = bins.size();
    r.reduction_db = -10.0 * std::log10(md / me);
    if (bins.size() > 1) {
        vd /= n - 1.0;
        ve /= n - 1.0;
        cde /= n - 1.0;
        const double kappa = target.frame_length > 0 ? window_correlation_factor(target.frame_length) : 1.0;
        const double var_log = kappa * (vd / (md * md) + ve / (me * me) - 2.0 * cde / (md * me)) / n;
        r.std_error_db = 10.0 / std::numbers::ln10 * std::sqrt(std::max(var_log, 0.0));
    }
    return r;
}

}  // namespace sqhet
