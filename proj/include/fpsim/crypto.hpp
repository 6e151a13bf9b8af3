#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <openssl/crypto.h>
#include <openssl/evp.h>

namespace fpsim {

using Key128 = std::array<std::uint8_t, 16>;
using Nonce128 = std::array<std::uint8_t, 16>;
using Tag256 = std::array<std::uint8_t, 32>;

/// AES-128 in counter mode. CTR is an XOR stream, so the same call both
/// encrypts and decrypts; the nonce is the full 128-bit initial counter block.
inline std::vector<std::uint8_t> aes128_ctr_xor(const Key128& key,
                                                const Nonce128& nonce,
                                                std::span<const std::uint8_t> data) {
    std::vector<std::uint8_t> out(data.size());
    EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
    int ok = EVP_EncryptInit_ex(ctx, EVP_aes_128_ctr(), nullptr, key.data(), nonce.data());
    int len = 0;
    if (ok == 1 && !data.empty()) {
        ok = EVP_EncryptUpdate(ctx, out.data(), &len, data.data(),
                               static_cast<int>(data.size()));
    }
    int fin = 0;
    if (ok == 1) ok = EVP_EncryptFinal_ex(ctx, out.data() + len, &fin);
    EVP_CIPHER_CTX_free(ctx);
    if (ok != 1) throw std::runtime_error("AES-128-CTR failed");
    return out;
}

/// HMAC-SHA-256 over data under key.
inline Tag256 hmac_sha256(std::span<const std::uint8_t> key,
                          std::span<const std::uint8_t> data) {
    Tag256 tag{};
    std::size_t out_len = 0;
    // EVP_Q_mac requires a non-null data pointer even for empty input.
    static const std::uint8_t empty = 0;
    const std::uint8_t* ptr = data.empty() ? &empty : data.data();
    if (EVP_Q_mac(nullptr, "HMAC", nullptr, "SHA256", nullptr, key.data(), key.size(),
                  ptr, data.size(), tag.data(), tag.size(), &out_len) == nullptr ||
        out_len != tag.size()) {
        throw std::runtime_error("HMAC-SHA-256 failed");
    }
    return tag;
}

/// Constant-time equality for authentication tags.
inline bool tags_equal(const Tag256& a, const Tag256& b) {
    return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace fpsim
