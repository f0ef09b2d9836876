#pragma once

#include <array>
#include <cstddef>

namespace oracle {

/// One beam of the same-frequency scheme: its own squeezed vacuum is white
/// about its carrier, with `phase_var` in the carrier's phase quadrature and
/// `amplitude_var` in the amplitude quadrature (vacuum = 1 for both).
struct Beam {
    double amplitude = 1.0;
    double phase_var = 1.0;
    double amplitude_var = 1.0;
    double phase = 0.0;
};

struct Setup {
    std::array<Beam, 2> beams;
    std::size_t n_samples = 64;
    std::size_t beat_bin = 5;      ///< beat frequency in DFT bins
    std::size_t analysis_bin = 1;  ///< demodulated analysis bin
};

/// Variance of the phase-demodulated output at `analysis_bin`, relative to the
/// same setup with vacuum in place of both squeezers.
///
/// Brute force: the linearized photocurrent times the phase LO is written as
/// a linear map of all 4N real noise samples, the output bin as a naive DFT
/// of that map, and the variance as L^T V L with the explicit joint covariance
/// matrix V. Nothing here shares code with the simulator.
double straightforward_floor(const Setup& setup);

}  // namespace oracle
