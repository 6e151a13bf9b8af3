#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "fpsim/catalog.hpp"
#include "fpsim/context_store.hpp"
#include "fpsim/cost_model.hpp"
#include "fpsim/errors.hpp"
#include "fpsim/fabric.hpp"
#include "fpsim/kernel.hpp"
#include "fpsim/policies.hpp"
#include "fpsim/rng.hpp"

namespace fpsim {

enum class JobState { Waiting, Running, Preempted, Completed, Starved };

/// One workload instance. remaining_cycles counts down from service_cycles;
/// kernel_state advances one kernel step per executed cycle so preemption
/// transparency is checkable on every run.
struct Job {
    std::uint32_t id = 0;
    std::string benchmark;
    std::uint64_t service_cycles = 0;
    std::uint64_t remaining_cycles = 0;
    double clock_mhz = 100.0;
    int priority = 0;
    std::int64_t arrival_ns = 0;
    JobState state = JobState::Waiting;
    std::optional<int> slot;  // pinned to the first assigned slot, no migration
    std::optional<SealedContext> context;
    std::uint64_t switches = 0;  // completed save/restore pairs
    std::uint64_t kernel_state = 0;

    // run bookkeeping
    ResourceVector demand;
    std::uint64_t frames = 1;
    std::uint64_t evict_restarts = 0;
    std::uint64_t initial_kernel_state = 0;
    std::optional<MemoryRegion> region;
};

struct JobTemplate {
    std::string benchmark;
    std::uint32_t count = 1;
    std::int64_t arrival_ns = 0;
    int priority = 0;
    std::optional<std::uint64_t> latency_cycles_override;

    friend bool operator==(const JobTemplate&, const JobTemplate&) = default;
};

struct ScenarioConfig {
    FabricConfig fabric;
    std::vector<JobTemplate> workload;
    PolicyDescriptor policy;
    FrameCountPolicy frame_policy;
    FrameModel frame_model;  // context geometry; also feeds resource-estimate counts
    SwitchCostModel cost_model;
    std::uint64_t seed = 0;
    std::optional<std::int64_t> horizon_ns;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

enum class EventKind { Arrive, Dispatch, QuantumExpire, Save, Reset, Restore, Complete, Starve };

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Arrive: return "arrive";
        case EventKind::Dispatch: return "dispatch";
        case EventKind::QuantumExpire: return "quantum-expire";
        case EventKind::Save: return "save";
        case EventKind::Reset: return "reset";
        case EventKind::Restore: return "restore";
        case EventKind::Complete: return "complete";
        case EventKind::Starve: return "starve";
    }
    return "?";
}

/// Timeline entry. Events are instants; durations follow from the cost model
/// (a save started at t occupies the slot until t + save_cost).
struct ScheduleEvent {
    std::int64_t at_ns = 0;
    EventKind kind = EventKind::Arrive;
    std::uint32_t job = 0;
    std::optional<int> slot;

    friend bool operator==(const ScheduleEvent&, const ScheduleEvent&) = default;
};

// --- cycle-granular time accounting ------------------------------------------

/// Elapsed ns from job start after `cycles` cycles. All slice arithmetic
/// telescopes through this, so per-job slice times sum exactly to service
/// time no matter how execution is chopped up.
inline std::int64_t job_elapsed_ns(const Job& job, std::uint64_t cycles) {
    return cycles_to_ns(cycles, job.clock_mhz);
}

inline std::uint64_t job_done_cycles(const Job& job) {
    return job.service_cycles - job.remaining_cycles;
}

inline std::int64_t job_service_ns(const Job& job) {
    return job_elapsed_ns(job, job.service_cycles);
}

/// Largest whole-cycle count whose elapsed time fits in slice_ns, capped at
/// the job's remaining cycles.
inline std::uint64_t slice_cycles(const Job& job, std::int64_t slice_ns) {
    if (slice_ns <= 0 || job.remaining_cycles == 0) return 0;
    const std::uint64_t done = job_done_cycles(job);
    const std::int64_t t0 = job_elapsed_ns(job, done);
    auto cost = [&](std::uint64_t k) { return job_elapsed_ns(job, done + k) - t0; };

    auto k = static_cast<std::uint64_t>(static_cast<double>(slice_ns) * job.clock_mhz / 1000.0);
    if (k > job.remaining_cycles) k = job.remaining_cycles;
    while (k > 0 && cost(k) > slice_ns) --k;
    while (k < job.remaining_cycles && cost(k + 1) <= slice_ns) ++k;
    return k;
}

/// Smallest whole-cycle count whose elapsed time covers elapsed_ns (a running
/// job finishes its in-flight cycle before it can be stopped).
inline std::uint64_t cycles_covering(const Job& job, std::int64_t elapsed_ns) {
    if (elapsed_ns <= 0) return 0;
    const std::uint64_t done = job_done_cycles(job);
    const std::int64_t t0 = job_elapsed_ns(job, done);
    auto cost = [&](std::uint64_t k) { return job_elapsed_ns(job, done + k) - t0; };

    auto k = static_cast<std::uint64_t>(static_cast<double>(elapsed_ns) * job.clock_mhz / 1000.0);
    if (k > job.remaining_cycles) k = job.remaining_cycles;
    while (k > 0 && cost(k - 1) >= elapsed_ns) --k;
    while (k < job.remaining_cycles && cost(k) < elapsed_ns) ++k;
    return k;
}

/// Consumes up to slice_ns of execution in whole cycles: decrements
/// remaining_cycles, steps the verification kernel once per consumed cycle,
/// and returns the consumed time. A slice shorter than one cycle period
/// consumes nothing.
inline std::int64_t advance(Job& job, std::int64_t slice_ns) {
    const std::uint64_t k = slice_cycles(job, slice_ns);
    const std::uint64_t done = job_done_cycles(job);
    const std::int64_t consumed = job_elapsed_ns(job, done + k) - job_elapsed_ns(job, done);
    job.remaining_cycles -= k;
    job.kernel_state = kernel_jump(job.kernel_state, k);
    if (job.remaining_cycles == 0) job.state = JobState::Completed;
    return consumed;
}

/// Two zero-progress evictions prove the job can never complete under
/// evict-and-restart: deterministic livelock, ruled as starvation.
inline bool detect_starvation(const Job& job) { return job.evict_restarts >= 2; }

/// Expands workload templates against the builtin catalog into fresh jobs.
/// Ids are assigned in template order starting at 1. Throws ConfigError for
/// unknown benchmarks, missing latencies, footprints no slot can hold, or a
/// quantum shorter than one clock cycle.
inline std::vector<Job> expand_workload(const ScenarioConfig& scenario) {
    scenario.policy.validate();
    scenario.fabric.validate();
    scenario.frame_model.validate();
    scenario.cost_model.validate();
    const auto& catalog = builtin_catalog();
    std::vector<Job> jobs;
    std::uint32_t next_id = 1;
    for (const auto& tmpl : scenario.workload) {
        const BenchmarkSpec* entry = find_benchmark(catalog, tmpl.benchmark);
        if (!entry) throw ConfigError("unknown benchmark '" + tmpl.benchmark + "'");
        std::uint64_t cycles = 0;
        if (tmpl.latency_cycles_override) {
            cycles = *tmpl.latency_cycles_override;
        } else if (entry->latency_cycles) {
            cycles = *entry->latency_cycles;
        } else {
            throw ConfigError("benchmark '" + tmpl.benchmark +
                              "' has no latency_cycles; set latency_cycles_override");
        }
        if (cycles == 0) throw ConfigError("benchmark '" + tmpl.benchmark +
                                           "' latency must be positive");

        Occupancy empty = Occupancy::all_free(scenario.fabric);
        if (!smallest_fit(entry->resources, scenario.fabric, empty)) {
            throw ConfigError("benchmark '" + tmpl.benchmark + "' " +
                              to_string(entry->resources) + " fits no slot of fabric '" +
                              scenario.fabric.name + "'");
        }
        if (scenario.policy.quantum_based() &&
            cycles_to_ns(1, entry->clock_mhz) > *scenario.policy.quantum_ns) {
            throw ConfigError("quantum is shorter than one clock cycle of benchmark '" +
                              tmpl.benchmark + "'");
        }

        for (std::uint32_t i = 0; i < tmpl.count; ++i) {
            Job j;
            j.id = next_id++;
            j.benchmark = entry->name;
            j.service_cycles = cycles;
            j.remaining_cycles = cycles;
            j.clock_mhz = entry->clock_mhz;
            j.priority = tmpl.priority;
            j.arrival_ns = tmpl.arrival_ns;
            j.demand = entry->resources;
            j.frames = estimate_frames(entry->resources, scenario.frame_policy);
            SplitMix64 km(scenario.seed + j.id);
            j.initial_kernel_state = km.next();
            j.kernel_state = j.initial_kernel_state;
            jobs.push_back(std::move(j));
        }
    }
    return jobs;
}

namespace detail {

/// Single-run simulation state. Strictly single-threaded; all randomness is
/// derived from the scenario seed, so equal scenarios replay bit-identically.
class SimRun {
public:
    explicit SimRun(const ScenarioConfig& sc)
        : sc_(sc), jobs_(expand_workload(sc)), occupancy_(Occupancy::all_free(sc.fabric)),
          store_(std::nullopt, sc.seed) {
        run_.resize(jobs_.size());
        SplitMix64 ks(sc_.seed ^ 0x5345414C4B455931ull);
        for (std::size_t i = 0; i < key_.size(); i += 8) {
            const std::uint64_t w = ks.next();
            for (std::size_t b = 0; b < 8; ++b)
                key_[i + b] = static_cast<std::uint8_t>(w >> (8 * b));
        }
    }

    std::vector<ScheduleEvent> run() {
        for (const auto& j : jobs_) push(j.arrival_ns, EvType::Arrival, j.id, 0, 0);
        while (!heap_.empty()) {
            const Ev ev = heap_.top();
            if (sc_.horizon_ns && ev.t > *sc_.horizon_ns) break;
            heap_.pop();
            switch (ev.type) {
                case EvType::Arrival: handle_arrival_batch(ev); break;
                case EvType::SliceEnd: handle_slice_end(ev); break;
                case EvType::SaveDone: handle_save_done(ev); break;
                case EvType::SlotFree: handle_slot_free(ev); break;
                case EvType::ForcedPreempt: handle_forced_preempt(ev); break;
            }
        }
        return std::move(timeline_);
    }

    const std::vector<Job>& jobs() const { return jobs_; }

private:
    enum class EvType { Arrival, SliceEnd, SaveDone, SlotFree, ForcedPreempt };

    struct Ev {
        std::int64_t t;
        std::uint64_t seq;
        EvType type;
        std::uint32_t job;
        int slot;
        std::uint64_t epoch;

        bool operator>(const Ev& o) const {
            if (t != o.t) return t > o.t;
            return seq > o.seq;
        }
    };

    struct RunState {
        std::int64_t slice_start = 0;
        std::uint64_t granted_cycles = 0;
        std::int64_t granted_ns = 0;
        std::uint64_t epoch = 0;
        bool preempt_pending = false;
    };

    Job& job(std::uint32_t id) { return jobs_[id - 1]; }
    RunState& rstate(std::uint32_t id) { return run_[id - 1]; }

    void push(std::int64_t t, EvType type, std::uint32_t j, int slot, std::uint64_t epoch) {
        heap_.push(Ev{t, next_seq_++, type, j, slot, epoch});
    }

    void emit(std::int64_t t, EventKind kind, std::uint32_t j, std::optional<int> slot) {
        timeline_.push_back(ScheduleEvent{t, kind, j, slot});
    }

    void enqueue(std::uint32_t id) { queue_.push_back({next_queue_seq_++, id}); }

    void remove_from_queue(std::uint32_t id) {
        for (std::size_t i = 0; i < queue_.size(); ++i) {
            if (queue_[i].second == id) {
                queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(i));
                return;
            }
        }
    }

    std::vector<ReadyJobView> ready_views() const {
        std::vector<ReadyJobView> views;
        views.reserve(queue_.size());
        for (const auto& [seq, id] : queue_) {
            const Job& j = jobs_[id - 1];
            views.push_back(ReadyJobView{j.id, seq, j.priority, j.demand, j.slot});
        }
        return views;
    }

    std::vector<RunningJobView> running_views() const {
        std::vector<RunningJobView> views;
        for (const auto& j : jobs_) {
            if (j.state != JobState::Running) continue;
            views.push_back(RunningJobView{j.id, *j.slot, j.priority,
                                           run_[j.id - 1].preempt_pending});
        }
        return views;
    }

    // Arrivals at one instant are handled as a batch before any dispatch so
    // that simultaneous arrivals compete on policy order, not on event order.
    void handle_arrival_batch(const Ev& first) {
        std::vector<std::uint32_t> batch;
        const std::int64_t t = first.t;
        Ev ev = first;
        for (;;) {
            emit(t, EventKind::Arrive, ev.job, std::nullopt);
            enqueue(ev.job);
            batch.push_back(ev.job);
            if (heap_.empty() || heap_.top().type != EvType::Arrival || heap_.top().t != t)
                break;
            ev = heap_.top();
            heap_.pop();
        }
        if (sc_.policy.kind == PolicyKind::PriorityPreemptive) {
            for (std::uint32_t id : batch) {
                const Job& a = job(id);
                const Decision d = on_arrival(
                    sc_.policy, ReadyJobView{a.id, 0, a.priority, a.demand, a.slot},
                    running_views(), sc_.fabric);
                if (d.kind == Decision::Kind::PreemptAndDispatch)
                    plan_forced_preempt(d.job, t);
            }
        }
        try_dispatch(t);
    }

    void handle_slice_end(const Ev& ev) {
        if (ev.epoch != rstate(ev.job).epoch) return;  // cancelled slice
        Job& j = job(ev.job);
        apply_slice_progress(j);
        if (j.remaining_cycles == 0) {
            j.state = JobState::Completed;
            emit(ev.t, EventKind::Complete, j.id, *j.slot);
            free_slot(*j.slot);
            try_dispatch(ev.t);
            return;
        }
        emit(ev.t, EventKind::QuantumExpire, j.id, *j.slot);
        const Decision d = on_quantum_expire(
            sc_.policy, RunningJobView{j.id, *j.slot, j.priority, false}, ready_views());
        switch (d.kind) {
            case Decision::Kind::ContinueRunning:
                start_slice(j, ev.t);
                break;
            case Decision::Kind::PreemptAndDispatch:
                preempt_save(j, ev.t);
                break;
            case Decision::Kind::EvictRestartAndDispatch:
                evict_restart(j, ev.t);
                break;
            default:
                start_slice(j, ev.t);
                break;
        }
    }

    void handle_save_done(const Ev& ev) {
        emit(ev.t, EventKind::Reset, ev.job, ev.slot);
        push(ev.t + sc_.cost_model.reset_ns, EvType::SlotFree, ev.job, ev.slot, 0);
    }

    void handle_slot_free(const Ev& ev) {
        occupancy_.slots[ev.slot] = std::nullopt;
        try_dispatch(ev.t);
    }

    void handle_forced_preempt(const Ev& ev) {
        if (ev.epoch != rstate(ev.job).epoch) return;
        Job& j = job(ev.job);
        rstate(ev.job).preempt_pending = false;
        apply_slice_progress(j);
        preempt_save(j, ev.t);
    }

    void apply_slice_progress(Job& j) {
        RunState& rs = rstate(j.id);
        j.remaining_cycles -= rs.granted_cycles;
        j.kernel_state = kernel_jump(j.kernel_state, rs.granted_cycles);
        rs.granted_cycles = 0;
    }

    void start_slice(Job& j, std::int64_t t) {
        RunState& rs = rstate(j.id);
        const std::int64_t budget = sc_.policy.quantum_based()
                                        ? *sc_.policy.quantum_ns
                                        : job_elapsed_ns(j, j.service_cycles) -
                                              job_elapsed_ns(j, job_done_cycles(j));
        const std::uint64_t k = slice_cycles(j, budget);
        const std::uint64_t done = job_done_cycles(j);
        rs.slice_start = t;
        rs.granted_cycles = k;
        rs.granted_ns = job_elapsed_ns(j, done + k) - job_elapsed_ns(j, done);
        ++rs.epoch;
        push(t + rs.granted_ns, EvType::SliceEnd, j.id, *j.slot, rs.epoch);
    }

    /// Save then reset; the slot stays occupied until both finish. The job
    /// requeues at the tail with its context sealed.
    void preempt_save(Job& j, std::int64_t t) {
        const int slot = *j.slot;
        emit(t, EventKind::Save, j.id, slot);
        RuntimeState rst{j.id, static_cast<std::uint32_t>(slot), t, j.remaining_cycles,
                         j.kernel_state};
        const ContextImage img = capture(rst, sc_.frame_model, j.frames);
        if (!j.region) j.region = store_.allocate_region(j.frames, sc_.frame_model);
        j.context = seal(img, key_, store_.next_nonce());
        j.state = JobState::Preempted;
        ++rstate(j.id).epoch;
        enqueue(j.id);
        push(t + save_cost(j.frames, sc_.cost_model), EvType::SaveDone, j.id, slot, 0);
    }

    /// Eviction without preemption: all progress is discarded and the job
    /// restarts from scratch, or is ruled starved after the second futile
    /// quantum.
    void evict_restart(Job& j, std::int64_t t) {
        const int slot = *j.slot;
        emit(t, EventKind::Reset, j.id, slot);
        j.remaining_cycles = j.service_cycles;
        j.kernel_state = j.initial_kernel_state;
        j.context.reset();
        ++j.evict_restarts;
        ++rstate(j.id).epoch;
        if (detect_starvation(j)) {
            j.state = JobState::Starved;
            emit(t, EventKind::Starve, j.id, slot);
        } else {
            j.state = JobState::Waiting;
            enqueue(j.id);
        }
        push(t + sc_.cost_model.reset_ns, EvType::SlotFree, j.id, slot, 0);
    }

    /// Cancels the victim's slice at the next cycle boundary at or after t
    /// and schedules the save there. Skipped if the slice ends first.
    void plan_forced_preempt(std::uint32_t victim_id, std::int64_t t) {
        Job& v = job(victim_id);
        RunState& rs = rstate(victim_id);
        if (v.state != JobState::Running || rs.preempt_pending) return;
        const std::int64_t elapsed = t - rs.slice_start;
        const std::uint64_t k = cycles_covering(v, elapsed);
        if (k >= rs.granted_cycles) return;  // completes or expires first
        const std::uint64_t done = job_done_cycles(v);
        const std::int64_t boundary =
            rs.slice_start + (job_elapsed_ns(v, done + k) - job_elapsed_ns(v, done));
        rs.granted_cycles = k;
        rs.granted_ns = boundary - rs.slice_start;
        rs.preempt_pending = true;
        ++rs.epoch;
        push(boundary, EvType::ForcedPreempt, victim_id, *v.slot, rs.epoch);
    }

    void free_slot(int slot) { occupancy_.slots[slot] = std::nullopt; }

    void try_dispatch(std::int64_t t) {
        for (;;) {
            const Decision d = on_slot_free(sc_.policy, ready_views(), sc_.fabric, occupancy_);
            if (d.kind != Decision::Kind::DispatchToFreeSlot) return;
            dispatch(job(d.job), d.slot, t);
        }
    }

    void dispatch(Job& j, int slot, std::int64_t t) {
        remove_from_queue(j.id);
        occupancy_.slots[slot] = j.id;
        j.slot = slot;
        emit(t, EventKind::Dispatch, j.id, slot);
        std::int64_t run_start = t;
        if (j.state == JobState::Preempted) {
            emit(t, EventKind::Restore, j.id, slot);
            const RuntimeState back = restore(unseal(*j.context, key_), sc_.frame_model);
            j.remaining_cycles = back.remaining_cycles;
            j.kernel_state = back.kernel_state;
            j.context.reset();
            ++j.switches;
            run_start += sc_.cost_model.reconfig_load_ns + restore_cost(j.frames, sc_.cost_model);
        }
        j.state = JobState::Running;
        start_slice(j, run_start);
    }

    const ScenarioConfig& sc_;
    std::vector<Job> jobs_;
    std::vector<RunState> run_;
    std::vector<ScheduleEvent> timeline_;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> queue_;  // (seq, job id)
    Occupancy occupancy_;
    ContextStore store_;
    Key128 key_{};
    std::priority_queue<Ev, std::vector<Ev>, std::greater<>> heap_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_queue_seq_ = 0;
};

}  // namespace detail

struct SimOutput {
    std::vector<ScheduleEvent> timeline;
    std::vector<Job> final_jobs;
};

/// Runs the scenario to completion (or to the horizon). Deterministic:
/// identical scenarios give identical timelines and final job states.
inline SimOutput simulate_full(const ScenarioConfig& scenario) {
    detail::SimRun run(scenario);
    SimOutput out;
    out.timeline = run.run();
    out.final_jobs = run.jobs();
    return out;
}

inline std::vector<ScheduleEvent> simulate(const ScenarioConfig& scenario) {
    detail::SimRun run(scenario);
    return run.run();
}

}  // namespace fpsim
