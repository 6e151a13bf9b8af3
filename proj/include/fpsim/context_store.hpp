#pragma once

#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpsim/cost_model.hpp"
#include "fpsim/crc32.hpp"
#include "fpsim/crypto.hpp"
#include "fpsim/errors.hpp"
#include "fpsim/rng.hpp"

namespace fpsim {

/// One configuration frame. words[crc_word_index] holds the CRC of the other
/// words, so a frame is self-checking.
struct Frame {
    std::vector<std::uint32_t> words;

    friend bool operator==(const Frame&, const Frame&) = default;
};

/// Captured, restorable job state. Frames carry the payload; everything else
/// is duplicated in clear fields for convenience and cross-checked on restore.
struct ContextImage {
    std::uint32_t job_id = 0;
    std::uint32_t slot_id = 0;
    std::int64_t captured_at_ns = 0;
    std::uint64_t remaining_cycles = 0;
    std::uint64_t kernel_state = 0;
    std::vector<Frame> frames;

    friend bool operator==(const ContextImage&, const ContextImage&) = default;
};

struct MemoryRegion {
    std::uint64_t base = 0;
    std::uint64_t size = 0;

    std::uint64_t end() const { return base + size; }

    friend bool operator==(const MemoryRegion&, const MemoryRegion&) = default;
};

struct SealedContext {
    Nonce128 nonce{};
    std::vector<std::uint8_t> ciphertext;
    Tag256 tag{};

    friend bool operator==(const SealedContext&, const SealedContext&) = default;
};

/// The kernel-visible runtime state a capture preserves.
struct RuntimeState {
    std::uint32_t job_id = 0;
    std::uint32_t slot_id = 0;
    std::int64_t captured_at_ns = 0;
    std::uint64_t remaining_cycles = 0;
    std::uint64_t kernel_state = 0;

    friend bool operator==(const RuntimeState&, const RuntimeState&) = default;
};

/// CRC over the words of a frame excluding the CRC slot itself, in order,
/// serialized little-endian. Input length must be words_per_frame - 1.
inline std::uint32_t compute_frame_crc(std::span<const std::uint32_t> words_excluding_crc) {
    return crc32_words(words_excluding_crc);
}

namespace detail {

inline std::uint32_t frame_crc_of(const Frame& f, std::uint32_t crc_index) {
    std::vector<std::uint32_t> rest;
    rest.reserve(f.words.size() - 1);
    for (std::size_t i = 0; i < f.words.size(); ++i)
        if (i != crc_index) rest.push_back(f.words[i]);
    return compute_frame_crc(rest);
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

struct ByteReader {
    std::span<const std::uint8_t> data;
    std::size_t pos = 0;

    bool need(std::size_t n) const { return pos + n <= data.size(); }

    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(data[pos++]) << (8 * b);
        return v;
    }

    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(data[pos++]) << (8 * b);
        return v;
    }
};

}  // namespace detail

/// Serializes a captured job's state into CRC-stamped frames. Frame 0 words
/// 0-1 hold remaining_cycles (lo, hi), 2-3 kernel_state, 4 job id, 5 slot id;
/// everything else is zero padding. Deterministic: equal states give
/// bit-identical images.
inline ContextImage capture(const RuntimeState& state, const FrameModel& model,
                            std::uint64_t frame_count) {
    model.validate();
    if (frame_count < 1) throw std::invalid_argument("frame_count must be >= 1");
    if (model.words_per_frame < 7 || model.crc_word_index < 6)
        throw std::invalid_argument("frame layout too small for the context payload");

    ContextImage img;
    img.job_id = state.job_id;
    img.slot_id = state.slot_id;
    img.captured_at_ns = state.captured_at_ns;
    img.remaining_cycles = state.remaining_cycles;
    img.kernel_state = state.kernel_state;
    img.frames.resize(frame_count);

    for (auto& f : img.frames) f.words.assign(model.words_per_frame, 0);
    auto& w = img.frames[0].words;
    w[0] = static_cast<std::uint32_t>(state.remaining_cycles);
    w[1] = static_cast<std::uint32_t>(state.remaining_cycles >> 32);
    w[2] = static_cast<std::uint32_t>(state.kernel_state);
    w[3] = static_cast<std::uint32_t>(state.kernel_state >> 32);
    w[4] = state.job_id;
    w[5] = state.slot_id;
    for (auto& f : img.frames)
        f.words[model.crc_word_index] = detail::frame_crc_of(f, model.crc_word_index);
    return img;
}

/// Inverse of capture. Every frame's CRC is checked first; a mismatch names
/// the failing frame.
inline RuntimeState restore(const ContextImage& image, const FrameModel& model) {
    model.validate();
    if (image.frames.empty()) throw DecodeError("context image has no frames");
    for (std::size_t i = 0; i < image.frames.size(); ++i) {
        const auto& f = image.frames[i];
        if (f.words.size() != model.words_per_frame)
            throw DecodeError("frame " + std::to_string(i) + " has wrong word count");
        if (f.words[model.crc_word_index] != detail::frame_crc_of(f, model.crc_word_index))
            throw CrcMismatch(i, "frame " + std::to_string(i) + " failed its CRC check");
    }
    const auto& w = image.frames[0].words;
    RuntimeState st;
    st.remaining_cycles = static_cast<std::uint64_t>(w[0]) |
                          (static_cast<std::uint64_t>(w[1]) << 32);
    st.kernel_state = static_cast<std::uint64_t>(w[2]) |
                      (static_cast<std::uint64_t>(w[3]) << 32);
    st.job_id = w[4];
    st.slot_id = w[5];
    st.captured_at_ns = image.captured_at_ns;
    return st;
}

// --- sealing ----------------------------------------------------------------
//
// Encrypt-then-MAC: the serialized image is encrypted with AES-128-CTR under
// a fresh nonce, then tagged with HMAC-SHA-256 over nonce || ciphertext.
// Wire format (little-endian, bit-exact):
//   "FPCS" | version u8=1 | nonce (16) | ciphertext length u32 | ciphertext | tag (32)

inline constexpr std::uint8_t kSealVersion = 1;

inline std::vector<std::uint8_t> serialize_image(const ContextImage& img) {
    std::vector<std::uint8_t> out;
    const std::uint32_t wpf =
        img.frames.empty() ? 0 : static_cast<std::uint32_t>(img.frames[0].words.size());
    out.reserve(40 + static_cast<std::size_t>(img.frames.size()) * wpf * 4);
    detail::put_u32(out, img.job_id);
    detail::put_u32(out, img.slot_id);
    detail::put_u64(out, static_cast<std::uint64_t>(img.captured_at_ns));
    detail::put_u64(out, img.remaining_cycles);
    detail::put_u64(out, img.kernel_state);
    detail::put_u32(out, static_cast<std::uint32_t>(img.frames.size()));
    detail::put_u32(out, wpf);
    for (const auto& f : img.frames)
        for (std::uint32_t w : f.words) detail::put_u32(out, w);
    return out;
}

inline ContextImage deserialize_image(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r{bytes};
    if (!r.need(40)) throw DecodeError("image payload truncated");
    ContextImage img;
    img.job_id = r.u32();
    img.slot_id = r.u32();
    img.captured_at_ns = static_cast<std::int64_t>(r.u64());
    img.remaining_cycles = r.u64();
    img.kernel_state = r.u64();
    const std::uint32_t frame_count = r.u32();
    const std::uint32_t wpf = r.u32();
    const std::uint64_t body = static_cast<std::uint64_t>(frame_count) * wpf * 4;
    if (!r.need(body)) throw DecodeError("image payload truncated");
    img.frames.resize(frame_count);
    for (auto& f : img.frames) {
        f.words.resize(wpf);
        for (auto& w : f.words) w = r.u32();
    }
    if (r.pos != bytes.size()) throw DecodeError("trailing bytes after image payload");
    return img;
}

inline SealedContext seal(const ContextImage& image, const Key128& key, const Nonce128& nonce) {
    SealedContext sc;
    sc.nonce = nonce;
    sc.ciphertext = aes128_ctr_xor(key, nonce, serialize_image(image));
    std::vector<std::uint8_t> mac_input(nonce.begin(), nonce.end());
    mac_input.insert(mac_input.end(), sc.ciphertext.begin(), sc.ciphertext.end());
    sc.tag = hmac_sha256(key, mac_input);
    return sc;
}

/// Verifies the tag before any decryption or decoding.
inline ContextImage unseal(const SealedContext& sc, const Key128& key) {
    std::vector<std::uint8_t> mac_input(sc.nonce.begin(), sc.nonce.end());
    mac_input.insert(mac_input.end(), sc.ciphertext.begin(), sc.ciphertext.end());
    if (!tags_equal(hmac_sha256(key, mac_input), sc.tag))
        throw IntegrityError("sealed context failed authentication");
    const auto plain = aes128_ctr_xor(key, sc.nonce, sc.ciphertext);
    return deserialize_image(plain);
}

inline std::vector<std::uint8_t> encode_sealed(const SealedContext& sc) {
    std::vector<std::uint8_t> out;
    out.reserve(57 + sc.ciphertext.size());
    out.insert(out.end(), {'F', 'P', 'C', 'S'});
    out.push_back(kSealVersion);
    out.insert(out.end(), sc.nonce.begin(), sc.nonce.end());
    detail::put_u32(out, static_cast<std::uint32_t>(sc.ciphertext.size()));
    out.insert(out.end(), sc.ciphertext.begin(), sc.ciphertext.end());
    out.insert(out.end(), sc.tag.begin(), sc.tag.end());
    return out;
}

/// Any framing damage counts as tampering: a blob either authenticates as a
/// whole or raises IntegrityError.
inline SealedContext decode_sealed(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r{bytes};
    if (!r.need(57)) throw IntegrityError("sealed blob truncated");
    if (!(bytes[0] == 'F' && bytes[1] == 'P' && bytes[2] == 'C' && bytes[3] == 'S'))
        throw IntegrityError("sealed blob has bad magic");
    if (bytes[4] != kSealVersion) throw IntegrityError("sealed blob has bad version");
    r.pos = 5;
    SealedContext sc;
    for (auto& b : sc.nonce) b = bytes[r.pos++];
    const std::uint32_t ct_len = r.u32();
    if (bytes.size() != 57 + static_cast<std::uint64_t>(ct_len))
        throw IntegrityError("sealed blob length mismatch");
    sc.ciphertext.assign(bytes.begin() + 25, bytes.begin() + 25 + ct_len);
    for (std::size_t i = 0; i < sc.tag.size(); ++i) sc.tag[i] = bytes[25 + ct_len + i];
    return sc;
}

inline std::vector<std::uint8_t> seal_bytes(const ContextImage& image, const Key128& key,
                                            const Nonce128& nonce) {
    return encode_sealed(seal(image, key, nonce));
}

inline ContextImage unseal_bytes(std::span<const std::uint8_t> blob, const Key128& key) {
    return unseal(decode_sealed(blob), key);
}

// --- DRAM region bookkeeping -------------------------------------------------

/// Bump allocator over a simulated DRAM address space. Every context gets a
/// unique region sized from its frame footprint plus a fixed 64-byte metadata
/// header; regions never overlap. Owned by one simulation run.
class ContextStore {
public:
    static constexpr std::uint64_t kRegionHeaderBytes = 64;

    explicit ContextStore(std::optional<std::uint64_t> budget_bytes = std::nullopt,
                          std::uint64_t nonce_seed = 0)
        : budget_(budget_bytes), nonce_rng_(nonce_seed ^ 0x4652414D45535452ull) {}

    MemoryRegion allocate_region(std::uint64_t frames, const FrameModel& model) {
        if (frames < 1) throw std::invalid_argument("frames must be >= 1");
        const std::uint64_t size = frames * model.frame_bytes() + kRegionHeaderBytes;
        if (budget_ && next_base_ + size > *budget_) {
            throw CapacityExceeded("DRAM budget exhausted: need " + std::to_string(size) +
                                   " bytes at offset " + std::to_string(next_base_) +
                                   ", budget " + std::to_string(*budget_));
        }
        const MemoryRegion region{next_base_, size};
        next_base_ += size;
        regions_.push_back(region);
        return region;
    }

    /// Deterministic per-store nonce stream for sealing.
    Nonce128 next_nonce() {
        Nonce128 n;
        nonce_rng_.fill_bytes(n.data(), n.size());
        return n;
    }

    const std::vector<MemoryRegion>& regions() const { return regions_; }

private:
    std::optional<std::uint64_t> budget_;
    std::uint64_t next_base_ = 0;
    std::vector<MemoryRegion> regions_;
    Xoshiro256 nonce_rng_;
};

}  // namespace fpsim
