#pragma once

#include <array>
#include <cstdint>

namespace fpsim {

/// SplitMix64. Used to expand 64-bit seeds into independent streams and to
/// seed Xoshiro256. The generator family is fixed: changing it would silently
/// change every seeded artifact (plans, nonces, generated workloads).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256** 1.0, seeded from SplitMix64.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform value in [0, bound) by rejection; bound must be > 0.
    std::uint64_t bounded(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    /// Fills a byte buffer from successive 64-bit outputs (little-endian).
    void fill_bytes(std::uint8_t* out, std::size_t n) {
        std::size_t i = 0;
        while (i < n) {
            std::uint64_t w = next();
            for (int b = 0; b < 8 && i < n; ++b, ++i) {
                out[i] = static_cast<std::uint8_t>(w >> (8 * b));
            }
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace fpsim
