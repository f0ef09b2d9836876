#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace sqhet {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Stateless: the output is a pure function of (counter, key).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key);
};

std::uint64_t splitmix64(std::uint64_t x);

/// Identifies one independent random substream: a master seed plus a
/// 64-bit stream id. Streams never share Philox counters.
struct RngKey {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// Child stream, e.g. the fresh vacuum mixed in by a loss stage.
    [[nodiscard]] RngKey derive(std::uint64_t tag) const;

    friend bool operator==(const RngKey&, const RngKey&) = default;
};

/// Builds the stream id used for one (run, frame, port) triple.
RngKey substream(std::uint64_t seed, std::uint32_t run, std::uint64_t frame, std::uint32_t port);

/// Sequential standard-normal draws from one substream (Box-Muller on
/// Philox output). Two normals per Philox block.
class NormalStream {
public:
    explicit NormalStream(RngKey key);

    double next();
    /// Circular complex Gaussian with E|z|^2 = variance.
    std::complex<double> next_complex(double variance = 1.0);
    /// Uniform on (0, 1).
    double next_uniform();

private:
    void refill();

    RngKey key_;
    std::uint64_t block_ = 0;
    std::array<double, 2> buffer_{};
    int available_ = 0;
};

}  // namespace sqhet
