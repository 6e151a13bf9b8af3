#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace fpsim {

namespace detail {

inline constexpr std::array<std::uint32_t, 256> make_crc32_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
        }
        table[i] = c;
    }
    return table;
}

inline constexpr auto crc32_table = make_crc32_table();

}  // namespace detail

/// CRC-32, IEEE 802.3 polynomial: reflected, init all-ones, final xor all-ones.
/// Matches zlib's crc32(); the test suite cross-checks against zlib.
inline std::uint32_t crc32_ieee(std::span<const std::uint8_t> data,
                                std::uint32_t seed = 0) {
    std::uint32_t c = seed ^ 0xFFFFFFFFu;
    for (std::uint8_t byte : data) {
        c = detail::crc32_table[(c ^ byte) & 0xFFu] ^ (c >> 8);
    }
    return c ^ 0xFFFFFFFFu;
}

/// CRC-32 over 32-bit words serialized little-endian, in order.
inline std::uint32_t crc32_words(std::span<const std::uint32_t> words) {
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::uint32_t w : words) {
        for (int b = 0; b < 4; ++b) {
            const std::uint8_t byte = static_cast<std::uint8_t>(w >> (8 * b));
            c = detail::crc32_table[(c ^ byte) & 0xFFu] ^ (c >> 8);
        }
    }
    return c ^ 0xFFFFFFFFu;
}

}  // namespace fpsim
