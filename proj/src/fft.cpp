#include "sqhet/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace sqhet::fft {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (size, direction) and never freed.
class PlanCache {
public:
    fftw_plan get(int n, int sign) {
        std::lock_guard lock(mutex_);
        auto it = plans_.find({n, sign});
        if (it != plans_.end()) return it->second;
        cvec in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
        fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                       reinterpret_cast<fftw_complex*>(out.data()), sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(std::make_pair(n, sign), p);
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

cvec execute(std::span<const std::complex<double>> x, int sign) {
    const int n = static_cast<int>(x.size());
    cvec in(x.begin(), x.end());
    cvec out(x.size());
    if (n == 0) return out;
    fftw_execute_dft(cache().get(n, sign), reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

}  // namespace

cvec forward(std::span<const std::complex<double>> x) { return execute(x, FFTW_FORWARD); }

cvec backward(std::span<const std::complex<double>> x) { return execute(x, FFTW_BACKWARD); }

cvec forward_real(std::span<const double> x) {
    cvec c(x.begin(), x.end());
    return forward(c);
}

std::vector<double> backward_real(std::span<const std::complex<double>> x) {
    const cvec t = backward(x);
    std::vector<double> out(t.size());
    const double inv = t.empty() ? 0.0 : 1.0 / static_cast<double>(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i].real() * inv;
    return out;
}

}  // namespace sqhet::fft
