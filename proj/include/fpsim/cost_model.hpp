#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "fpsim/resources.hpp"

namespace fpsim {

/// Geometry of one configuration frame, the smallest addressable unit of
/// configuration memory. Defaults describe 7-series devices; UltraScale
/// differs only in word count.
struct FrameModel {
    std::uint32_t words_per_frame = 101;
    std::uint32_t word_bits = 32;
    std::uint32_t crc_word_index = 50;  // zero-based; the middle word of 101
    std::uint32_t luts_per_frame = 50;
    std::uint32_t ffs_per_frame = 800;
    std::uint32_t extra_frames = 0;  // BRAM/DSP/routing allowance, not derivable per-resource

    static FrameModel seven_series() { return FrameModel{}; }

    static FrameModel ultrascale() {
        FrameModel m;
        m.words_per_frame = 123;
        m.crc_word_index = 61;
        return m;
    }

    std::uint64_t frame_bytes() const {
        return static_cast<std::uint64_t>(words_per_frame) * (word_bits / 8);
    }

    std::uint64_t frame_bits() const {
        return static_cast<std::uint64_t>(words_per_frame) * word_bits;
    }

    void validate() const {
        if (word_bits != 32) throw std::invalid_argument("frame words are 32-bit");
        if (words_per_frame == 0) throw std::invalid_argument("words_per_frame must be positive");
        if (crc_word_index >= words_per_frame)
            throw std::invalid_argument("crc_word_index must be < words_per_frame");
        if (luts_per_frame == 0 || ffs_per_frame == 0)
            throw std::invalid_argument("luts_per_frame and ffs_per_frame must be positive");
    }

    friend bool operator==(const FrameModel&, const FrameModel&) = default;
};

/// Per-frame save/restore latencies plus fixed per-switch charges, all in
/// integer nanoseconds. Defaults are the measured PCAP timings at 100 MHz:
/// 0.0311 ms save, 0.0337 ms restore per frame.
struct SwitchCostModel {
    std::int64_t save_ns_per_frame = 31100;
    std::int64_t restore_ns_per_frame = 33700;
    std::int64_t reset_ns = 0;
    std::int64_t reconfig_load_ns = 0;

    void validate() const {
        if (save_ns_per_frame < 0 || restore_ns_per_frame < 0 || reset_ns < 0 ||
            reconfig_load_ns < 0) {
            throw std::invalid_argument("cost model fields must be >= 0");
        }
    }

    friend bool operator==(const SwitchCostModel&, const SwitchCostModel&) = default;
};

/// How many configuration frames a context occupies.
struct FrameCountPolicy {
    enum class Kind { SingleFrame, ResourceEstimate, Fixed };

    Kind kind = Kind::SingleFrame;
    std::uint64_t fixed_frames = 1;  // Fixed only; >= 1
    FrameModel model;                // ResourceEstimate only

    static FrameCountPolicy single_frame() { return FrameCountPolicy{}; }

    static FrameCountPolicy fixed(std::uint64_t n) {
        if (n < 1) throw std::invalid_argument("fixed frame count must be >= 1");
        return FrameCountPolicy{Kind::Fixed, n, {}};
    }

    static FrameCountPolicy resource_estimate(FrameModel m = {}) {
        m.validate();
        return FrameCountPolicy{Kind::ResourceEstimate, 1, m};
    }

    friend bool operator==(const FrameCountPolicy&, const FrameCountPolicy&) = default;
};

namespace detail {
inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
    return a == 0 ? 0 : (a - 1) / b + 1;
}
}  // namespace detail

/// Frames occupied by a footprint under the policy. ResourceEstimate counts
/// LUT-frames and FF-frames from the model plus the flat extra allowance;
/// always at least 1.
inline std::uint64_t estimate_frames(const ResourceVector& demand,
                                     const FrameCountPolicy& policy) {
    switch (policy.kind) {
        case FrameCountPolicy::Kind::SingleFrame:
            return 1;
        case FrameCountPolicy::Kind::Fixed:
            return policy.fixed_frames;
        case FrameCountPolicy::Kind::ResourceEstimate: {
            const std::uint64_t n = detail::ceil_div(demand.luts, policy.model.luts_per_frame) +
                                    detail::ceil_div(demand.ffs, policy.model.ffs_per_frame) +
                                    policy.model.extra_frames;
            return n < 1 ? 1 : n;
        }
    }
    return 1;
}

inline std::int64_t save_cost(std::uint64_t frames, const SwitchCostModel& model) {
    return static_cast<std::int64_t>(frames) * model.save_ns_per_frame;
}

inline std::int64_t restore_cost(std::uint64_t frames, const SwitchCostModel& model) {
    return static_cast<std::int64_t>(frames) * model.restore_ns_per_frame;
}

/// Full context-switch charge: save + restore + slot reset + reconfiguration
/// load. 64,800 ns per frame under the default model.
inline std::int64_t switch_cost(std::uint64_t frames, const SwitchCostModel& model) {
    return save_cost(frames, model) + restore_cost(frames, model) + model.reset_ns +
           model.reconfig_load_ns;
}

/// Nanoseconds for `cycles` at `clock_mhz`, rounded to the nearest integer.
/// Integral clocks take an exact integer path so millisecond case-study sums
/// reproduce exactly without float drift (10 ns/cycle at 100 MHz).
inline std::int64_t cycles_to_ns(std::uint64_t cycles, double clock_mhz) {
    if (!(clock_mhz > 0)) throw std::invalid_argument("clock_mhz must be > 0");
    const auto whole = static_cast<std::uint64_t>(clock_mhz);
    if (static_cast<double>(whole) == clock_mhz) {
        return static_cast<std::int64_t>((cycles * 1000 + whole / 2) / whole);
    }
    return static_cast<std::int64_t>(
        std::llround(static_cast<double>(cycles) * 1000.0 / clock_mhz));
}

}  // namespace fpsim
