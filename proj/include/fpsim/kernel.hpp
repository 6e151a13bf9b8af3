#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fpsim/context_store.hpp"
#include "fpsim/rng.hpp"

namespace fpsim {

inline constexpr std::uint64_t kKernelMultiplier = 6364136223846793005ull;
inline constexpr std::uint64_t kKernelIncrement = 1442695040888963407ull;

/// One step of the chained verification kernel (Knuth's MMIX LCG). Each
/// output feeds the next step, so any state corruption propagates to the
/// final value — the same chained-dependency structure the hardware
/// experiment gets from chained encryptions, at desk-scale cost.
inline std::uint64_t kernel_step(std::uint64_t state) {
    return state * kKernelMultiplier + kKernelIncrement;
}

/// k steps of the kernel in O(log k) by composing the affine map with itself.
/// Must agree with iterating kernel_step exactly; the test suite checks that.
inline std::uint64_t kernel_jump(std::uint64_t state, std::uint64_t k) {
    std::uint64_t mul = 1, add = 0;
    std::uint64_t base_mul = kKernelMultiplier, base_add = kKernelIncrement;
    while (k != 0) {
        if (k & 1) {
            add = base_mul * add + base_add;
            mul = base_mul * mul;
        }
        base_add = base_mul * base_add + base_add;
        base_mul = base_mul * base_mul;
        k >>= 1;
    }
    return mul * state + add;
}

/// Straight-loop run: the reference result every preempted run must match.
inline std::uint64_t run_uninterrupted(std::uint64_t seed, std::uint64_t total_steps) {
    std::uint64_t s = seed;
    for (std::uint64_t i = 0; i < total_steps; ++i) s = kernel_step(s);
    return s;
}

/// Step indices at which the run is preempted; strictly increasing, each
/// < total_steps.
struct PreemptionPlan {
    std::vector<std::uint64_t> points;
    std::uint64_t seed = 0;
};

/// k distinct preemption points sampled uniformly without replacement from
/// [0, total_steps), sorted. Deterministic for a fixed rng_seed.
inline PreemptionPlan random_plan(std::uint64_t rng_seed, std::uint64_t total_steps,
                                  std::uint64_t k) {
    if (k > total_steps) throw std::invalid_argument("cannot pick more points than steps");
    Xoshiro256 rng(rng_seed);
    // Floyd's sampling: k distinct values, then sort.
    std::vector<std::uint64_t> picked;
    picked.reserve(k);
    auto contains = [&](std::uint64_t v) {
        for (std::uint64_t p : picked)
            if (p == v) return true;
        return false;
    };
    for (std::uint64_t j = total_steps - k; j < total_steps; ++j) {
        const std::uint64_t t = rng.bounded(j + 1);
        picked.push_back(contains(t) ? j : t);
    }
    std::sort(picked.begin(), picked.end());
    return PreemptionPlan{std::move(picked), rng_seed};
}

/// Optional corruption hook applied to the sealed blob while the context sits
/// "in DRAM"; used to prove tampering is always caught.
using TamperFn = std::function<void(std::vector<std::uint8_t>&)>;

/// Runs total_steps kernel steps, preempting at every plan point with the
/// full protocol: capture -> seal -> zero the live state (the slot reset) ->
/// unseal -> restore -> continue. Exactly total_steps steps execute
/// regardless of the plan, and the result must equal run_uninterrupted.
inline std::uint64_t run_with_preemptions(std::uint64_t seed, std::uint64_t total_steps,
                                          const PreemptionPlan& plan, ContextStore& store,
                                          const Key128& key, const TamperFn& tamper = {}) {
    std::uint64_t state = seed;
    std::uint64_t done = 0;
    const FrameModel model;  // 7-series geometry; one frame holds the payload

    auto run_to = [&](std::uint64_t target) {
        for (; done < target; ++done) state = kernel_step(state);
    };

    for (std::size_t i = 0; i < plan.points.size(); ++i) {
        const std::uint64_t point = plan.points[i];
        if (point >= total_steps) throw std::invalid_argument("plan point out of range");
        if (i > 0 && plan.points[i] <= plan.points[i - 1])
            throw std::invalid_argument("plan points must be strictly increasing");
        run_to(point);

        RuntimeState rs;
        rs.job_id = 0;
        rs.slot_id = 0;
        rs.captured_at_ns = static_cast<std::int64_t>(done);
        rs.remaining_cycles = total_steps - done;
        rs.kernel_state = state;

        store.allocate_region(1, model);
        auto blob = seal_bytes(capture(rs, model, 1), key, store.next_nonce());

        // Slot reset: the live state must carry nothing across the gap.
        state = 0;
        done = 0;

        if (tamper) tamper(blob);

        const RuntimeState back = restore(unseal_bytes(blob, key), model);
        state = back.kernel_state;
        done = total_steps - back.remaining_cycles;
    }
    run_to(total_steps);
    return state;
}

}  // namespace fpsim
