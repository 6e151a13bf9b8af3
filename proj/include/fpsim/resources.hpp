#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace fpsim {

/// LUT/FF/BRAM/DSP footprint. The unit of slot-fit tests, frame estimation
/// and DRAM sizing. Components are counts, never negative.
struct ResourceVector {
    std::uint64_t luts = 0;
    std::uint64_t ffs = 0;
    std::uint64_t brams = 0;
    std::uint64_t dsps = 0;

    friend bool operator==(const ResourceVector&, const ResourceVector&) = default;

    /// Lexicographic order on (luts, ffs, brams, dsps); used as the
    /// slot-size ordering for smallest-fit placement.
    friend auto operator<=>(const ResourceVector&, const ResourceVector&) = default;
};

/// True iff demand <= capacity in every component.
inline bool fits(const ResourceVector& demand, const ResourceVector& capacity) {
    return demand.luts <= capacity.luts && demand.ffs <= capacity.ffs &&
           demand.brams <= capacity.brams && demand.dsps <= capacity.dsps;
}

inline std::string to_string(const ResourceVector& r) {
    return "(" + std::to_string(r.luts) + ", " + std::to_string(r.ffs) + ", " +
           std::to_string(r.brams) + ", " + std::to_string(r.dsps) + ")";
}

}  // namespace fpsim
