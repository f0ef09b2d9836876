#include "sqhet/filters.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sqhet/errors.hpp"
#include "sqhet/fft.hpp"

namespace sqhet {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

struct Prototype {
    std::vector<cplx> poles;  // normalized low-pass, cutoff 1 rad/s
    double dc_gain = 1.0;     // |H(0)| the digital stage is scaled to
};

Prototype analog_prototype(int order, double ripple_db) {
    Prototype p;
    const double n = order;
    if (ripple_db > 0.0) {
        const double eps = std::sqrt(std::pow(10.0, ripple_db / 10.0) - 1.0);
        const double mu = std::asinh(1.0 / eps) / n;
        for (int k = 0; k < order; ++k) {
            const double th = kPi * (2.0 * k + 1.0) / (2.0 * n);
            p.poles.emplace_back(-std::sinh(mu) * std::sin(th), std::cosh(mu) * std::cos(th));
        }
        if (order % 2 == 0) p.dc_gain = 1.0 / std::sqrt(1.0 + eps * eps);
    } else {
        for (int k = 0; k < order; ++k) p.poles.push_back(std::polar(1.0, kPi * (2.0 * k + n + 1.0) / (2.0 * n)));
    }
    return p;
}

double prewarp(double freq, double fs) { return 2.0 * fs * std::tan(kPi * freq / fs); }

cplx bilinear(cplx s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

cplx evaluate(const std::vector<cplx>& zeros, const std::vector<cplx>& poles, double gain, cplx z) {
    cplx h(gain, 0.0);
    for (const auto& q : zeros) h *= z - q;
    for (const auto& p : poles) h /= z - p;
    return h;
}

bool is_real(cplx r) { return std::abs(r.imag()) <= 1e-12 * (1.0 + std::abs(r)); }

// Factors prod(1 - r z^-1) into quadratics / one trailing linear term.
std::vector<std::array<double, 3>> factor(const std::vector<cplx>& roots) {
    std::vector<std::array<double, 3>> out;
    std::vector<double> reals;
    for (const auto& r : roots) {
        if (is_real(r))
            reals.push_back(r.real());
        else if (r.imag() > 0.0)
            out.push_back({1.0, -2.0 * r.real(), std::norm(r)});
    }
    std::size_t i = 0;
    for (; i + 1 < reals.size(); i += 2) out.push_back({1.0, -(reals[i] + reals[i + 1]), reals[i] * reals[i + 1]});
    if (i < reals.size()) out.push_back({1.0, -reals[i], 0.0});
    return out;
}

}  // namespace

std::string to_string(FilterKind k) {
    switch (k) {
        case FilterKind::band_stop: return "band-stop";
        case FilterKind::low_pass: return "low-pass";
        case FilterKind::high_pass: return "high-pass";
        case FilterKind::gain: return "gain";
    }
    return "gain";
}

FilterKind filter_kind_from_string(const std::string& s) {
    if (s == "band-stop") return FilterKind::band_stop;
    if (s == "low-pass") return FilterKind::low_pass;
    if (s == "high-pass") return FilterKind::high_pass;
    if (s == "gain") return FilterKind::gain;
    throw std::invalid_argument("unknown filter kind '" + s + "'");
}

void FilterSpec::validate(double sample_rate) const {
    if (kind == FilterKind::gain) {
        if (!std::isfinite(gain_db)) throw std::invalid_argument("filter: gain_db must be finite");
        return;
    }
    if (order < 1) throw std::invalid_argument("filter: order must be >= 1");
    if (!(ripple_db >= 0.0)) throw std::invalid_argument("filter: ripple_db must be >= 0");
    const double nyq = 0.5 * sample_rate;
    const int used = kind == FilterKind::band_stop ? 2 : 1;
    for (int i = 0; i < used; ++i)
        if (!(corners[i] > 0.0 && corners[i] < nyq))
            throw BandError("filter: corner " + std::to_string(corners[i]) + " Hz not inside (0, Nyquist)");
    if (kind == FilterKind::band_stop && !(corners[0] < corners[1]))
        throw std::invalid_argument("filter: band-stop corners must be increasing");
}

FilterChain::FilterChain(std::vector<FilterSpec> specs, double sample_rate)
    : specs_(std::move(specs)), sample_rate_(sample_rate) {
    if (!(sample_rate > 0.0)) throw std::invalid_argument("filter chain: sample_rate must be > 0");
    const double fs = sample_rate;
    for (const auto& spec : specs_) {
        spec.validate(fs);
        Stage st;
        if (spec.kind == FilterKind::gain) {
            st.gain = std::pow(10.0, spec.gain_db / 20.0);
            sections_.push_back({st.gain, 0.0, 0.0, 0.0, 0.0});
            stages_.push_back(std::move(st));
            continue;
        }
        const Prototype proto = analog_prototype(spec.order, spec.ripple_db);
        std::vector<cplx> s_zeros, s_poles;
        cplx z_ref(1.0, 0.0);
        switch (spec.kind) {
            case FilterKind::low_pass: {
                const double wc = prewarp(spec.corners[0], fs);
                for (const auto& p : proto.poles) s_poles.push_back(wc * p);
                break;
            }
            case FilterKind::high_pass: {
                const double wc = prewarp(spec.corners[0], fs);
                for (const auto& p : proto.poles) {
                    s_poles.push_back(wc / p);
                    s_zeros.emplace_back(0.0, 0.0);
                }
                z_ref = cplx(-1.0, 0.0);
                break;
            }
            case FilterKind::band_stop: {
                const double w1 = prewarp(spec.corners[0], fs), w2 = prewarp(spec.corners[1], fs);
                const double bw = w2 - w1, w0 = std::sqrt(w1 * w2);
                for (const auto& p : proto.poles) {
                    const cplx disc = std::sqrt(cplx(bw * bw) - 4.0 * p * p * w0 * w0);
                    s_poles.push_back((bw + disc) / (2.0 * p));
                    s_poles.push_back((bw - disc) / (2.0 * p));
                    s_zeros.emplace_back(0.0, w0);
                    s_zeros.emplace_back(0.0, -w0);
                }
                break;
            }
            case FilterKind::gain: break;
        }
        for (const auto& s : s_poles) st.poles.push_back(bilinear(s, fs));
        for (const auto& s : s_zeros) st.zeros.push_back(bilinear(s, fs));
        while (st.zeros.size() < st.poles.size()) st.zeros.emplace_back(-1.0, 0.0);
        st.gain = proto.dc_gain / std::abs(evaluate(st.zeros, st.poles, 1.0, z_ref));

        const auto num = factor(st.zeros);
        const auto den = factor(st.poles);
        if (num.size() != den.size()) throw std::logic_error("filter: unbalanced section factorization");
        for (std::size_t i = 0; i < num.size(); ++i) {
            const double g = i == 0 ? st.gain : 1.0;
            sections_.push_back({g * num[i][0], g * num[i][1], g * num[i][2], den[i][1], den[i][2]});
        }
        stages_.push_back(std::move(st));
    }
}

std::complex<double> FilterChain::response(double freq) const {
    const cplx z = std::polar(1.0, 2.0 * kPi * freq / sample_rate_);
    cplx h(1.0, 0.0);
    for (const auto& st : stages_) h *= evaluate(st.zeros, st.poles, st.gain, z);
    return h;
}

std::vector<std::complex<double>> FilterChain::bin_response(std::size_t n) const {
    std::vector<cplx> h(n, cplx(1.0, 0.0));
    if (empty()) return h;
    const double df = sample_rate_ / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = k < n / 2 ? static_cast<double>(k) * df : (static_cast<double>(k) - static_cast<double>(n)) * df;
        h[k] = response(f);
    }
    return h;
}

std::vector<double> FilterChain::apply_response(std::span<const std::complex<double>> h, std::span<const double> x) {
    if (h.size() != x.size()) throw std::invalid_argument("filter: response length differs from frame");
    auto spec = fft::forward_real(x);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= h[k];
    return fft::backward_real(spec);
}

std::vector<double> FilterChain::apply(std::span<const double> x) const {
    if (empty()) return {x.begin(), x.end()};
    return apply_response(bin_response(x.size()), x);
}

PhotocurrentTrace FilterChain::apply(const PhotocurrentTrace& trace) const {
    if (!empty() && trace.grid.sample_rate != sample_rate_)
        throw BandError("filter chain designed for a different sample rate");
    PhotocurrentTrace out = trace;
    out.samples = apply(trace.samples);
    return out;
}

std::vector<double> FilterChain::apply_recursive(std::span<const double> x) const {
    std::vector<double> y(x.begin(), x.end());
    for (const auto& s : sections_) {
        double z1 = 0.0, z2 = 0.0;
        for (auto& v : y) {
            const double in = v;
            const double out = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * out + z2;
            z2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
    return y;
}

PhotocurrentTrace apply_filter_chain(const PhotocurrentTrace& trace, const std::vector<FilterSpec>& chain) {
    return FilterChain(chain, trace.grid.sample_rate).apply(trace);
}

std::vector<FilterSpec> default_raw_chain() {
    FilterSpec hp{FilterKind::high_pass, {1.2e6, 0.0}, 5, 0.0, 0.0};
    FilterSpec bs{FilterKind::band_stop, {8.5e6, 11.5e6}, 5, 0.3, 0.0};
    FilterSpec lp{FilterKind::low_pass, {15e6, 0.0}, 5, 0.0, 0.0};
    FilterSpec amp{FilterKind::gain, {0.0, 0.0}, 1, 0.0, 20.0};
    return {hp, bs, lp, amp};
}

std::vector<FilterSpec> default_demod_chain() {
    FilterSpec lp{FilterKind::low_pass, {5e6, 0.0}, 8, 0.0, 0.0};
    FilterSpec hp{FilterKind::high_pass, {1.2e6, 0.0}, 5, 0.0, 0.0};
    FilterSpec amp{FilterKind::gain, {0.0, 0.0}, 1, 0.0, 20.0};
    return {lp, hp, amp};
}

}  // namespace sqhet
