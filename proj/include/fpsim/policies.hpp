#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpsim/errors.hpp"
#include "fpsim/fabric.hpp"
#include "fpsim/resources.hpp"

namespace fpsim {

enum class PolicyKind {
    RoundRobinPreemptive,
    RoundRobinEvictRestart,
    RunToCompletion,
    PriorityPreemptive,
};

inline const char* to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::RoundRobinPreemptive: return "rr-preemptive";
        case PolicyKind::RoundRobinEvictRestart: return "rr-evict-restart";
        case PolicyKind::RunToCompletion: return "run-to-completion";
        case PolicyKind::PriorityPreemptive: return "priority-preemptive";
    }
    return "?";
}

struct PolicyDescriptor {
    PolicyKind kind = PolicyKind::RoundRobinPreemptive;
    std::optional<std::int64_t> quantum_ns;

    bool quantum_based() const {
        return kind == PolicyKind::RoundRobinPreemptive ||
               kind == PolicyKind::RoundRobinEvictRestart;
    }

    void validate() const {
        if (quantum_based()) {
            if (!quantum_ns) throw ConfigError(std::string(to_string(kind)) +
                                               " requires quantum_ns");
            if (*quantum_ns <= 0) throw ConfigError("quantum_ns must be > 0");
        } else if (quantum_ns && *quantum_ns <= 0) {
            throw ConfigError("quantum_ns must be > 0");
        }
    }

    friend bool operator==(const PolicyDescriptor&, const PolicyDescriptor&) = default;
};

/// What the engine should do at a decision point. Idle doubles as "no action"
/// for paths where the only effect is enqueueing (arrivals that preempt
/// nobody).
struct Decision {
    enum class Kind {
        ContinueRunning,
        PreemptAndDispatch,
        EvictRestartAndDispatch,
        DispatchToFreeSlot,
        Idle,
    };

    Kind kind = Kind::Idle;
    std::uint32_t job = 0;  // dispatch target or preemption victim
    int slot = 0;           // DispatchToFreeSlot only

    static Decision continue_running() { return {Kind::ContinueRunning, 0, 0}; }
    static Decision idle() { return {Kind::Idle, 0, 0}; }
    static Decision preempt_and_dispatch(std::uint32_t j) {
        return {Kind::PreemptAndDispatch, j, 0};
    }
    static Decision evict_restart_and_dispatch(std::uint32_t j) {
        return {Kind::EvictRestartAndDispatch, j, 0};
    }
    static Decision dispatch(std::uint32_t j, int s) {
        return {Kind::DispatchToFreeSlot, j, s};
    }

    friend bool operator==(const Decision&, const Decision&) = default;
};

/// Snapshot of a waiting job, in enqueue order (seq strictly increasing).
struct ReadyJobView {
    std::uint32_t id = 0;
    std::uint64_t seq = 0;
    int priority = 0;
    ResourceVector demand;
    std::optional<int> pinned_slot;  // set once a job has run somewhere
};

struct RunningJobView {
    std::uint32_t id = 0;
    int slot = 0;
    int priority = 0;
    bool preempt_pending = false;
};

/// Decision at a quantum boundary for a still-incomplete running job.
/// Preemptive RR hands the slot to the queue head; with an empty queue it
/// keeps running (a self-switch would buy nothing and cost a full save +
/// restore). Evict-restart always evicts: the quantum boundary discards all
/// progress, which is exactly the no-preemption baseline being modeled.
inline Decision on_quantum_expire(const PolicyDescriptor& policy,
                                  const RunningJobView& running,
                                  const std::vector<ReadyJobView>& ready) {
    switch (policy.kind) {
        case PolicyKind::RoundRobinPreemptive:
            if (ready.empty()) return Decision::continue_running();
            return Decision::preempt_and_dispatch(ready.front().id);
        case PolicyKind::RoundRobinEvictRestart:
            return Decision::evict_restart_and_dispatch(ready.empty() ? running.id
                                                                      : ready.front().id);
        case PolicyKind::RunToCompletion:
        case PolicyKind::PriorityPreemptive:
            return Decision::continue_running();
    }
    return Decision::continue_running();
}

namespace detail {

inline std::vector<const ReadyJobView*> dispatch_order(const PolicyDescriptor& policy,
                                                       const std::vector<ReadyJobView>& ready) {
    std::vector<const ReadyJobView*> order;
    order.reserve(ready.size());
    for (const auto& r : ready) order.push_back(&r);
    if (policy.kind == PolicyKind::PriorityPreemptive) {
        std::stable_sort(order.begin(), order.end(),
                         [](const ReadyJobView* a, const ReadyJobView* b) {
                             if (a->priority != b->priority) return a->priority > b->priority;
                             return a->seq < b->seq;
                         });
    } else {
        std::stable_sort(order.begin(), order.end(),
                         [](const ReadyJobView* a, const ReadyJobView* b) {
                             return a->seq < b->seq;
                         });
    }
    return order;
}

}  // namespace detail

/// Picks the next dispatch when at least one slot is free: FIFO for the RR
/// kinds and run-to-completion, highest-priority-first for the priority
/// policy. Pinned jobs only return to their own slot; fresh jobs take the
/// smallest fitting free slot. Idle if nothing dispatchable fits.
inline Decision on_slot_free(const PolicyDescriptor& policy,
                             const std::vector<ReadyJobView>& ready,
                             const FabricConfig& fabric, const Occupancy& occupancy) {
    for (const ReadyJobView* r : detail::dispatch_order(policy, ready)) {
        if (r->pinned_slot) {
            if (occupancy.is_free(*r->pinned_slot))
                return Decision::dispatch(r->id, *r->pinned_slot);
            continue;
        }
        if (auto slot = smallest_fit(r->demand, fabric, occupancy))
            return Decision::dispatch(r->id, *slot);
    }
    return Decision::idle();
}

/// Arrival-time decision. Only the priority policy may act: an arriver with
/// strictly higher priority preempts the lowest-priority running job whose
/// slot fits it (ties never preempt; FIFO among equals). Every other kind
/// just enqueues, reported as Idle.
inline Decision on_arrival(const PolicyDescriptor& policy, const ReadyJobView& arriving,
                           const std::vector<RunningJobView>& running,
                           const FabricConfig& fabric) {
    if (policy.kind != PolicyKind::PriorityPreemptive) return Decision::idle();
    const RunningJobView* victim = nullptr;
    for (const auto& r : running) {
        if (r.preempt_pending || r.priority >= arriving.priority) continue;
        const Slot* slot = fabric.find_slot(r.slot);
        if (!slot || !fits(arriving.demand, slot->capacity)) continue;
        if (!victim || r.priority < victim->priority ||
            (r.priority == victim->priority && r.slot < victim->slot)) {
            victim = &r;
        }
    }
    if (!victim) return Decision::idle();
    return Decision::preempt_and_dispatch(victim->id);
}

}  // namespace fpsim
