#include "oracles/covariance_oracle.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace oracle {

namespace {

// Variable layout per sample t: [amp1, phase1, amp2, phase2] at 4t..4t+3.
Eigen::MatrixXd joint_covariance(const Setup& s, bool squeezed) {
    const auto n = static_cast<Eigen::Index>(4 * s.n_samples);
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    if (!squeezed) return v;
    for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(s.n_samples); ++t) {
        for (Eigen::Index b = 0; b < 2; ++b) {
            v(4 * t + 2 * b, 4 * t + 2 * b) = s.beams[b].amplitude_var;
            v(4 * t + 2 * b + 1, 4 * t + 2 * b + 1) = s.beams[b].phase_var;
        }
    }
    return v;
}

double output_variance(const Setup& s, const Eigen::MatrixXd& v) {
    const auto n = static_cast<Eigen::Index>(s.n_samples);
    const double e1 = s.beams[0].amplitude, e2 = s.beams[1].amplitude;
    Eigen::VectorXd re = Eigen::VectorXd::Zero(4 * n), im = Eigen::VectorXd::Zero(4 * n);
    for (Eigen::Index t = 0; t < n; ++t) {
        const double tt = static_cast<double>(t) / static_cast<double>(n);
        // Beat phase of beam 2 against beam 1.
        const double psi = 2.0 * std::numbers::pi * static_cast<double>(s.beat_bin) * tt + s.beams[1].phase -
                           s.beams[0].phase;
        const double lo = 2.0 * std::sin(psi);
        // Linearized cross term 2 Re(conj(c1) c2) with c = exp(i theta) (E + a + i p).
        // Beam 1 enters conjugated, so the two phase-quadrature terms differ in sign.
        const double d_amp1 = 2.0 * e2 * std::cos(psi), d_phase1 = 2.0 * e2 * std::sin(psi);
        const double d_amp2 = 2.0 * e1 * std::cos(psi), d_phase2 = -2.0 * e1 * std::sin(psi);
        const double arg = -2.0 * std::numbers::pi * static_cast<double>(s.analysis_bin) * tt;
        const double c = std::cos(arg) / static_cast<double>(n), sn = std::sin(arg) / static_cast<double>(n);
        const double coeffs[4] = {d_amp1 * lo, d_phase1 * lo, d_amp2 * lo, d_phase2 * lo};
        for (int j = 0; j < 4; ++j) {
            re(4 * t + j) = coeffs[j] * c;
            im(4 * t + j) = coeffs[j] * sn;
        }
    }
    return re.dot(v * re) + im.dot(v * im);
}

}  // namespace

double straightforward_floor(const Setup& setup) {
    return output_variance(setup, joint_covariance(setup, true)) /
           output_variance(setup, joint_covariance(setup, false));
}

}  // namespace oracle
