#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace marc::rng {

// Philox4x32-10 block function. Counter-based: every 128-bit counter maps to
// an independent 128-bit output under a 64-bit key, so streams can be indexed
// by (seed, frame, tag) and results never depend on draw interleaving or on
// how work is split across workers.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> x,
                                               std::array<std::uint32_t, 2> k) {
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * x[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * x[2];
        x = {static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k[1],
             static_cast<std::uint32_t>(p0)};
        k[0] += w0;
        k[1] += w1;
    }
    return x;
}

// One logical random stream, identified by (seed, frame, tag). Distinct
// triples give statistically independent sequences; the same triple always
// replays the same sequence.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t frame, std::uint32_t tag)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          frame_lo_(static_cast<std::uint32_t>(frame)),
          frame_hi_(static_cast<std::uint32_t>(frame >> 32)),
          tag_(tag) {}

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            buf_ = philox4x32({frame_lo_, frame_hi_, tag_, block_++}, key_);
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(next_u32()) + 0.5) * 0x1p-32;
    }

    // Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * M_PI * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

    // Circularly-symmetric complex normal with E[|z|^2] = var.
    std::complex<double> cnormal(double var) {
        const double s = std::sqrt(0.5 * var);
        return {s * normal(), s * normal()};
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t frame_lo_, frame_hi_, tag_;
    std::uint32_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace marc::rng
