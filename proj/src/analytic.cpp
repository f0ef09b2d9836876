#include "sqhet/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace sqhet {

void SqueezerSpec::validate() const {
    if (!(pump_ratio >= 0.0) || !(pump_ratio < 1.0))
        throw std::invalid_argument("squeezer: pump ratio must be in [0, 1) (below threshold)");
    if (!(hwhm > 0.0)) throw std::invalid_argument("squeezer: hwhm must be > 0");
    if (!(escape_efficiency >= 0.0 && escape_efficiency <= 1.0))
        throw std::invalid_argument("squeezer: escape efficiency must be in [0, 1]");
    if (!std::isfinite(squeeze_angle) || !std::isfinite(center_freq))
        throw std::invalid_argument("squeezer: angle and center must be finite");
}

QuadraturePowers opo_squeezing_spectrum(const SqueezerSpec& spec, double offset) {
    spec.validate();
    const double x = spec.pump_ratio;
    const double u = (offset / spec.hwhm) * (offset / spec.hwhm);
    const double g = spec.escape_efficiency * 4.0 * x;
    return {1.0 - g / ((1.0 + x) * (1.0 + x) + u), 1.0 + g / ((1.0 - x) * (1.0 - x) + u)};
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

double predicted_reduction(const SqueezingLevels& levels, Sideband band) {
    const auto& [w1, w2] = levels.weights;
    if (!(w1 > 0.0 && w2 > 0.0)) throw std::invalid_argument("predicted_reduction: weights must be > 0");
    auto factor = [&](const SourceLevels& s) {
        switch (band) {
            case Sideband::lower: return from_db(-s.s_lower_db);
            case Sideband::upper: return from_db(-s.s_upper_db);
            case Sideband::demod: return 0.5 * (from_db(-s.s_lower_db) + from_db(-s.s_upper_db));
        }
        return 1.0;
    };
    const double mean = (w1 * factor(levels.sources[0]) + w2 * factor(levels.sources[1])) / (w1 + w2);
    return -to_db(mean);
}

double classical_noise_limit(double classical_fraction, double squeezing_linear) {
    return -to_db(classical_fraction + (1.0 - classical_fraction) * squeezing_linear);
}

double phase_jitter_penalty(double squeezing_linear, double antisqueezing_linear, double theta_rms) {
    const double c = std::cos(theta_rms);
    const double s = std::sin(theta_rms);
    return squeezing_linear * c * c + antisqueezing_linear * s * s;
}

double mean_quadrature_power(double squeezing_linear, double antisqueezing_linear, double static_offset,
                             double sigma) {
    const double cos2 = 0.5 * (1.0 + std::cos(2.0 * static_offset) * std::exp(-2.0 * sigma * sigma));
    return squeezing_linear * cos2 + antisqueezing_linear * (1.0 - cos2);
}

double straightforward_phase_floor(double squeezing_linear, double antisqueezing_linear) {
    return 0.25 * (3.0 * squeezing_linear + antisqueezing_linear);
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::proposed: return "proposed";
        case Scheme::straightforward: return "straightforward";
        case Scheme::unsqueezed: return "unsqueezed";
    }
    return "?";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "proposed") return Scheme::proposed;
    if (s == "straightforward") return Scheme::straightforward;
    if (s == "unsqueezed") return Scheme::unsqueezed;
    throw std::invalid_argument("unknown scheme '" + s + "'");
}

namespace {

NoiseBudget finish(NoiseBudget b, double shot_sq, double shot_anti, double shot_loss, double classical_fraction,
                   double independent_rel) {
    if (!(classical_fraction >= 0.0 && classical_fraction < 1.0))
        throw std::invalid_argument("budget: classical fraction must be in [0, 1)");
    const double classical = classical_fraction / (1.0 - classical_fraction);
    const double ref = 1.0 + classical + independent_rel;
    b.squeezed = shot_sq / ref;
    b.antisqueezed = shot_anti / ref;
    b.loss_vacuum = shot_loss / ref;
    b.classical = classical / ref;
    b.electronic = independent_rel / ref;
    b.floor = b.squeezed + b.antisqueezed + b.loss_vacuum + b.classical + b.electronic;
    return b;
}

double total_weight(const std::array<SourceTerm, 2>& sources) {
    const double w = sources[0].weight + sources[1].weight;
    if (!(w > 0.0)) throw std::invalid_argument("budget: weights must sum to > 0");
    return w;
}

}  // namespace

NoiseBudget proposed_budget(const std::array<SourceTerm, 2>& sources, double classical_fraction,
                            double independent_rel) {
    const double wsum = total_weight(sources);
    double sq = 0.0, anti = 0.0, loss = 0.0;
    for (const auto& s : sources) {
        const double w = s.weight / wsum;
        const double cos2 =
            0.5 * (1.0 + std::cos(2.0 * s.angle_error) * std::exp(-2.0 * s.jitter_rms * s.jitter_rms));
        sq += w * s.efficiency * s.powers.squeezed * cos2;
        anti += w * s.efficiency * s.powers.antisqueezed * (1.0 - cos2);
        loss += w * (1.0 - s.efficiency);
    }
    return finish({Scheme::proposed}, sq, anti, loss, classical_fraction, independent_rel);
}

NoiseBudget straightforward_budget(const std::array<SourceTerm, 2>& sources, double classical_fraction,
                                   double independent_rel) {
    const double wsum = total_weight(sources);
    double sq = 0.0, anti = 0.0, loss = 0.0;
    for (const auto& s : sources) {
        const double w = s.weight / wsum;
        const double phase =
            mean_quadrature_power(s.powers.squeezed, s.powers.antisqueezed, s.angle_error, s.jitter_rms);
        const double amplitude =
            mean_quadrature_power(s.powers.antisqueezed, s.powers.squeezed, s.angle_error, s.jitter_rms);
        sq += w * s.efficiency * 0.75 * phase;
        anti += w * s.efficiency * 0.25 * amplitude;
        loss += w * (1.0 - s.efficiency);
    }
    return finish({Scheme::straightforward}, sq, anti, loss, classical_fraction, independent_rel);
}

}  // namespace sqhet
