#include "sqhet/field.hpp"

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

void require_same_grid(const FieldRealization& a, const FieldRealization& b) {
    if (!(a.grid == b.grid) || a.amplitudes.size() != b.amplitudes.size())
        throw BandError("field grids differ");
}

}  // namespace

FieldRealization::FieldRealization(FrequencyGrid g, std::string lbl)
    : grid(g), amplitudes(g.n_samples), label(std::move(lbl)) {}

FieldRealization& FieldRealization::operator+=(const FieldRealization& other) {
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < amplitudes.size(); ++k) amplitudes[k] += other.amplitudes[k];
    return *this;
}

FieldRealization& FieldRealization::operator*=(double scale) {
    for (auto& a : amplitudes) a *= scale;
    return *this;
}

std::vector<double> QuadraturePair::quadrature(double phi) const {
    const double c = std::cos(phi), s = std::sin(phi);
    std::vector<double> x(a1.size());
    for (std::size_t n = 0; n < x.size(); ++n) x[n] = a1[n] * c - a2[n] * s;
    return x;
}

FieldRealization make_vacuum_field(const FrequencyGrid& grid, RngKey key) {
    grid.validate();
    FieldRealization f(grid, "vacuum");
    NormalStream rng(key);
    for (auto& a : f.amplitudes) a = rng.next_complex(1.0);
    return f;
}

FieldRealization apply_squeezer(const FieldRealization& field, const SqueezerSpec& spec) {
    spec.validate();
    const FrequencyGrid& g = field.grid;
    const std::size_t kc = g.optical_bin(spec.center_freq);
    FieldRealization out = field;
    out.label = field.label + "+squeezed";
    if (spec.pump_ratio == 0.0) return out;

    const std::size_t n = g.n_samples;
    const double cphi = std::cos(spec.squeeze_angle), sphi = std::sin(spec.squeeze_angle);
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const cplx i(0.0, 1.0);
    for (std::size_t m = 0; m <= n / 2; ++m) {
        const std::size_t kp = (kc + m) % n;
        const std::size_t km = (kc + n - m) % n;
        const auto p = opo_squeezing_spectrum(spec, static_cast<double>(m) * g.bin_spacing());
        const double gs = std::sqrt(p.squeezed), ga = std::sqrt(p.antisqueezed);

        const cplx up = field.amplitudes[kp];
        const cplx dn_conj = std::conj(field.amplitudes[km]);
        const cplx q1 = (up + dn_conj) * inv_sqrt2;
        const cplx q2 = i * (up - dn_conj) * inv_sqrt2;
        const cplx x = gs * (q1 * cphi - q2 * sphi);
        const cplx y = ga * (q1 * sphi + q2 * cphi);
        const cplx q1n = x * cphi + y * sphi;
        const cplx q2n = -x * sphi + y * cphi;
        out.amplitudes[kp] = (q1n - i * q2n) * inv_sqrt2;
        if (km != kp) out.amplitudes[km] = std::conj((q1n + i * q2n) * inv_sqrt2);
    }
    return out;
}

FieldRealization apply_loss(const FieldRealization& field, double efficiency, RngKey key) {
    if (!(efficiency >= 0.0 && efficiency <= 1.0))
        throw std::invalid_argument("apply_loss: efficiency must be in [0, 1]");
    if (efficiency == 1.0) return field;
    FieldRealization vac = make_vacuum_field(field.grid, key);
    const double keep = std::sqrt(efficiency), admit = std::sqrt(1.0 - efficiency);
    FieldRealization out(field.grid, field.label + "+loss");
    for (std::size_t k = 0; k < out.amplitudes.size(); ++k)
        out.amplitudes[k] = keep * field.amplitudes[k] + admit * vac.amplitudes[k];
    return out;
}

FieldRealization rotate(const FieldRealization& field, double phase) {
    FieldRealization out = field;
    if (phase == 0.0) return out;
    const cplx r = std::polar(1.0, phase);
    for (auto& a : out.amplitudes) a *= r;
    return out;
}

void add_carrier(FieldRealization& field, double amplitude, double offset, double phase) {
    const std::size_t k = field.grid.optical_bin(offset);
    const double scale = std::sqrt(0.5 * static_cast<double>(field.grid.n_samples));
    field.amplitudes[k] += std::polar(amplitude * scale, phase);
}

void add_carrier(FieldRealization& field, double amplitude, double offset, std::span<const double> phase) {
    const FrequencyGrid& g = field.grid;
    if (phase.size() != g.n_samples) throw BandError("carrier phase series length differs from grid");
    const std::size_t k0 = g.optical_bin(offset);
    const double f = g.baseband_frequency(k0);
    std::vector<cplx> env(g.n_samples);
    for (std::size_t n = 0; n < env.size(); ++n) env[n] = std::polar(amplitude, kTwoPi * f * g.time(n) + phase[n]);
    field += from_time_envelope(g, env, "carrier");
}

std::vector<std::complex<double>> time_envelope(const FieldRealization& field) {
    auto c = fft::backward(field.amplitudes);
    const double scale = std::sqrt(2.0 / static_cast<double>(field.grid.n_samples));
    for (auto& v : c) v *= scale;
    return c;
}

FieldRealization from_time_envelope(const FrequencyGrid& grid, std::span<const std::complex<double>> envelope,
                                    std::string label) {
    if (envelope.size() != grid.n_samples) throw BandError("envelope length differs from grid");
    FieldRealization f(grid, std::move(label));
    f.amplitudes = fft::forward(envelope);
    const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(grid.n_samples));
    for (auto& a : f.amplitudes) a *= scale;
    return f;
}

QuadraturePair quadrature_series(const FieldRealization& field, double center_freq) {
    const FrequencyGrid& g = field.grid;
    const std::size_t kc = g.optical_bin(center_freq);
    const std::size_t n = g.n_samples;
    std::vector<cplx> shifted(n);
    for (std::size_t k = 0; k < n; ++k) shifted[k] = field.amplitudes[(k + kc) % n];
    auto d = fft::backward(shifted);
    const double scale = std::sqrt(2.0 / static_cast<double>(n));
    QuadraturePair q{std::vector<double>(n), std::vector<double>(n), center_freq, g};
    for (std::size_t t = 0; t < n; ++t) {
        q.a1[t] = scale * d[t].real();
        q.a2[t] = -scale * d[t].imag();
    }
    return q;
}

EprDecomposition epr_decomposition(const FieldRealization& field, double omega0, double beat) {
    const FrequencyGrid& g = field.grid;
    for (double f : {omega0 - beat, omega0, omega0 + beat, omega0 + 2.0 * beat})
        if (!g.contains_optical(f)) throw BandError("EPR identity: frequency " + std::to_string(f) + " out of band");
    static_cast<void>(g.baseband_bin(beat));
    const auto mid = quadrature_series(field, omega0 + beat);
    const auto lo = quadrature_series(field, omega0);
    const auto hi = quadrature_series(field, omega0 + 2.0 * beat);

    const std::size_t n = g.n_samples;
    EprDecomposition e{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t t = 0; t < n; ++t) {
        const double arg = kTwoPi * beat * g.time(t);
        e.lhs[t] = 2.0 * mid.a1[t];
        e.phase_group[t] = hi.a2[t] - lo.a2[t];
        e.amplitude_group[t] = hi.a1[t] + lo.a1[t];
        e.rhs[t] = e.phase_group[t] * std::sin(arg) + e.amplitude_group[t] * std::cos(arg);
    }
    return e;
}

double epr_identity_residual(const FieldRealization& field, double omega0, double beat) {
    const auto e = epr_decomposition(field, omega0, beat);
    double diff = 0.0, scale = 0.0;
    for (std::size_t t = 0; t < e.lhs.size(); ++t) {
        diff = std::max(diff, std::abs(e.lhs[t] - e.rhs[t]));
        scale = std::max(scale, std::abs(e.lhs[t]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

}  // namespace sqhet
