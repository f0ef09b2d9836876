#include "sqhet/rng.hpp"

#include <cmath>
#include <numbers>

namespace sqhet {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Counter round(const Philox4x32::Counter& c, const Philox4x32::Key& k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// 53-bit uniform strictly inside (0, 1).
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
    ctr = round(ctr, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
        ctr = round(ctr, key);
    }
    return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

RngKey RngKey::derive(std::uint64_t tag) const {
    return {seed, splitmix64(stream ^ splitmix64(tag + 0x632BE59BD9B4E019ull))};
}

RngKey substream(std::uint64_t seed, std::uint32_t run, std::uint64_t frame, std::uint32_t port) {
    // frame in the high bits, then run and port bytes
    return {seed, (frame << 16) | (static_cast<std::uint64_t>(run & 0xFFu) << 8) | (port & 0xFFu)};
}

NormalStream::NormalStream(RngKey key) : key_(key) {}

void NormalStream::refill() {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                  static_cast<std::uint32_t>(key_.stream),
                                  static_cast<std::uint32_t>(key_.stream >> 32)};
    const Philox4x32::Key k{static_cast<std::uint32_t>(key_.seed), static_cast<std::uint32_t>(key_.seed >> 32)};
    ++block_;
    const auto out = Philox4x32::generate(ctr, k);
    const double u1 = to_open_unit(out[0], out[1]);
    const double u2 = to_open_unit(out[2], out[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    buffer_ = {r * std::cos(phi), r * std::sin(phi)};
    available_ = 2;
}

double NormalStream::next() {
    if (available_ == 0) refill();
    return buffer_[2 - available_--];
}

std::complex<double> NormalStream::next_complex(double variance) {
    const double s = std::sqrt(0.5 * variance);
    const double re = next();
    const double im = next();
    return {s * re, s * im};
}

double NormalStream::next_uniform() {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                  static_cast<std::uint32_t>(key_.stream),
                                  static_cast<std::uint32_t>(key_.stream >> 32)};
    const Philox4x32::Key k{static_cast<std::uint32_t>(key_.seed), static_cast<std::uint32_t>(key_.seed >> 32)};
    ++block_;
    const auto out = Philox4x32::generate(ctr, k);
    return to_open_unit(out[0], out[1]);
}

}  // namespace sqhet
