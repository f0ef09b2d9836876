#pragma once

#include <complex>
#include <span>
#include <vector>

namespace sqhet::fft {

using cvec = std::vector<std::complex<double>>;

/// Unnormalized forward DFT: X_k = sum_n x_n exp(-2 pi i k n / N).
cvec forward(std::span<const std::complex<double>> x);
/// Unnormalized inverse DFT: x_n = sum_k X_k exp(+2 pi i k n / N).
cvec backward(std::span<const std::complex<double>> x);

cvec forward_real(std::span<const double> x);
/// Real part of the unnormalized inverse DFT, divided by N.
std::vector<double> backward_real(std::span<const std::complex<double>> x);

}  // namespace sqhet::fft
