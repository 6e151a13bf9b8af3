#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <vector>

#include "fpsim/engine.hpp"
#include "fpsim/kernel.hpp"
#include "fpsim/report.hpp"

using namespace fpsim;

namespace {

ScenarioConfig scenario_i() {
    ScenarioConfig sc;
    sc.fabric = builtin_fabric("1-slot");
    sc.workload = {JobTemplate{"ml-kem-server", 100, 0, 0, {}}};
    sc.policy = {PolicyKind::RoundRobinPreemptive, 250000};
    sc.frame_policy = FrameCountPolicy::single_frame();
    sc.seed = 1;
    return sc;
}

ScenarioConfig scenario_ii() {
    ScenarioConfig sc;
    sc.fabric = builtin_fabric("1-slot");
    sc.workload = {JobTemplate{"h264-encoder", 1, 0, 0, {}},
                   JobTemplate{"ml-kem-server", 1, 400000, 0, {}},
                   JobTemplate{"ml-kem-server", 1, 1300000, 0, {}},
                   JobTemplate{"ml-kem-server", 1, 2200000, 0, {}}};
    sc.policy = {PolicyKind::RoundRobinPreemptive, 500000};
    sc.frame_policy = FrameCountPolicy::single_frame();
    sc.seed = 2;
    return sc;
}

Job mlkem_job() {
    Job j;
    j.id = 1;
    j.benchmark = "ml-kem-server";
    j.service_cycles = 34806;
    j.remaining_cycles = 34806;
    j.clock_mhz = 100.0;
    j.state = JobState::Running;
    return j;
}

std::vector<ScheduleEvent> events_of(const std::vector<ScheduleEvent>& tl, EventKind kind,
                                     std::uint32_t job = 0) {
    std::vector<ScheduleEvent> out;
    for (const auto& e : tl)
        if (e.kind == kind && (job == 0 || e.job == job)) out.push_back(e);
    return out;
}

/// Replays the timeline per slot and asserts occupancy intervals never
/// overlap; save/reset/restore transitions occupy the slot.
void check_slot_exclusivity(const std::vector<ScheduleEvent>& tl, const ScenarioConfig& sc) {
    const auto jobs = expand_workload(sc);
    struct SlotState {
        std::int64_t free_at = 0;
        bool save_pending = false;
        std::uint64_t frames = 1;
    };
    std::map<int, SlotState> slots;
    for (const auto& ev : tl) {
        if (!ev.slot) continue;
        SlotState& s = slots[*ev.slot];
        const std::uint64_t frames = jobs[ev.job - 1].frames;
        switch (ev.kind) {
            case EventKind::Dispatch:
                REQUIRE(ev.at_ns >= s.free_at);
                s.frames = frames;
                break;
            case EventKind::Save:
                s.save_pending = true;
                s.free_at = ev.at_ns + save_cost(frames, sc.cost_model) + sc.cost_model.reset_ns;
                break;
            case EventKind::Reset:
                if (!s.save_pending) s.free_at = ev.at_ns + sc.cost_model.reset_ns;
                s.save_pending = false;
                break;
            case EventKind::Complete:
                s.free_at = ev.at_ns;
                break;
            case EventKind::Restore:
                break;
            default:
                break;
        }
    }
}

void check_timeline_sorted(const std::vector<ScheduleEvent>& tl) {
    for (std::size_t i = 1; i < tl.size(); ++i) REQUIRE(tl[i].at_ns >= tl[i - 1].at_ns);
}

}  // namespace

TEST_CASE("advance is cycle-granular") {
    Job j = mlkem_job();

    CHECK(advance(j, 250000) == 250000);
    CHECK(j.remaining_cycles == 9806);
    CHECK(j.state == JobState::Running);

    CHECK(advance(j, 250000) == 98060);
    CHECK(j.remaining_cycles == 0);
    CHECK(j.state == JobState::Completed);

    Job fresh = mlkem_job();
    CHECK(advance(fresh, 5) == 0);  // shorter than one 10 ns cycle
    CHECK(fresh.remaining_cycles == 34806);

    // kernel steps once per consumed cycle
    Job tracked = mlkem_job();
    tracked.kernel_state = 77;
    advance(tracked, 100);
    CHECK(tracked.kernel_state == kernel_jump(77, 10));
}

TEST_CASE("scenario i: 100 ML-KEM jobs under preemptive RR, quantum 0.25 ms") {
    const ScenarioConfig sc = scenario_i();
    const SimOutput out = simulate_full(sc);
    check_timeline_sorted(out.timeline);
    check_slot_exclusivity(out.timeline, sc);

    REQUIRE(out.final_jobs.size() == 100);
    for (const auto& j : out.final_jobs) {
        CHECK(j.state == JobState::Completed);
        CHECK(j.switches == 1);
    }

    const auto completes = events_of(out.timeline, EventKind::Complete);
    REQUIRE(completes.size() == 100);
    CHECK(completes.back().at_ns == 41286000);

    // first round: dispatch k at (k-1) * 281,100; second round completions
    // are spaced by 131,760 = restore + tail
    const auto dispatches = events_of(out.timeline, EventKind::Dispatch);
    REQUIRE(dispatches.size() == 200);
    CHECK(dispatches[0].at_ns == 0);
    CHECK(dispatches[1].at_ns == 281100);
    CHECK(dispatches[99].at_ns == 99 * 281100);
    CHECK(dispatches[100].at_ns == 28110000);  // job 1 resumes
    CHECK(completes[0].at_ns == 28110000 + 131760);

    CHECK(events_of(out.timeline, EventKind::Save).size() == 100);
    CHECK(events_of(out.timeline, EventKind::Restore).size() == 100);
    CHECK(events_of(out.timeline, EventKind::Starve).empty());
}

TEST_CASE("scenario i: preemption transparency end to end") {
    const ScenarioConfig sc = scenario_i();
    const SimOutput out = simulate_full(sc);
    for (const auto& j : out.final_jobs) {
        CHECK(j.kernel_state == run_uninterrupted(j.initial_kernel_state, j.service_cycles));
    }
}

TEST_CASE("scenario ii: H.264 + ML-KEM stream, quantum 0.5 ms") {
    const ScenarioConfig sc = scenario_ii();
    const SimOutput out = simulate_full(sc);
    check_timeline_sorted(out.timeline);
    check_slot_exclusivity(out.timeline, sc);

    const Job& h264 = out.final_jobs[0];
    CHECK(h264.state == JobState::Completed);
    CHECK(h264.switches == 3);
    for (std::size_t i = 1; i < 4; ++i) {
        CHECK(out.final_jobs[i].state == JobState::Completed);
        CHECK(out.final_jobs[i].switches == 0);
    }

    const auto h_completes = events_of(out.timeline, EventKind::Complete, 1);
    REQUIRE(h_completes.size() == 1);
    CHECK(h_completes[0].at_ns == 2948870);

    const auto h_saves = events_of(out.timeline, EventKind::Save, 1);
    REQUIRE(h_saves.size() == 3);
    CHECK(h_saves[0].at_ns == 500000);
    CHECK(h_saves[1].at_ns == 1412860);
    CHECK(h_saves[2].at_ns == 2325720);

    const auto h_restores = events_of(out.timeline, EventKind::Restore, 1);
    REQUIRE(h_restores.size() == 3);
    CHECK(h_restores[0].at_ns == 879160);
    CHECK(h_restores[1].at_ns == 1792020);
    CHECK(h_restores[2].at_ns == 2704880);

    // the three ML-KEM executions fill the gaps exactly
    CHECK(events_of(out.timeline, EventKind::Complete, 2)[0].at_ns == 879160);
    CHECK(events_of(out.timeline, EventKind::Complete, 3)[0].at_ns == 1792020);
    CHECK(events_of(out.timeline, EventKind::Complete, 4)[0].at_ns == 2704880);

    for (const auto& j : out.final_jobs) {
        CHECK(j.kernel_state == run_uninterrupted(j.initial_kernel_state, j.service_cycles));
    }
}

TEST_CASE("empty workload gives an empty run") {
    ScenarioConfig sc = scenario_i();
    sc.workload.clear();
    const auto tl = simulate(sc);
    CHECK(tl.empty());
    const SimReport report = summarize(tl, sc);
    CHECK(report.jobs.empty());
    CHECK(report.makespan_ns == 0);
}

TEST_CASE("config errors") {
    ScenarioConfig sc = scenario_i();
    sc.workload = {JobTemplate{"no-such-bench", 1, 0, 0, {}}};
    CHECK_THROWS_MATCHES(simulate(sc), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("no-such-bench")));

    sc = scenario_i();
    sc.workload = {JobTemplate{"fft", 1, 0, 0, {}}};  // latency only in charts
    CHECK_THROWS_MATCHES(simulate(sc), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("fft")));

    sc = scenario_i();
    sc.workload = {JobTemplate{"matrix-multiplication", 1, 0, 0, 1000}};
    CHECK_THROWS_MATCHES(simulate(sc), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("fits no slot")));

    sc = scenario_i();
    sc.policy.quantum_ns = 5;  // shorter than one 10 ns cycle
    CHECK_THROWS_AS(simulate(sc), ConfigError);

    sc = scenario_i();
    sc.policy.quantum_ns.reset();
    CHECK_THROWS_AS(simulate(sc), ConfigError);
}

TEST_CASE("evict-restart starves jobs that outlive the quantum") {
    ScenarioConfig sc = scenario_i();
    sc.workload = {JobTemplate{"ml-kem-server", 1, 0, 0, {}}};
    sc.policy = {PolicyKind::RoundRobinEvictRestart, 250000};

    const SimOutput out = simulate_full(sc);
    const Job& j = out.final_jobs[0];
    CHECK(j.state == JobState::Starved);
    CHECK(j.evict_restarts == 2);
    CHECK(j.switches == 0);
    CHECK(j.context == std::nullopt);

    const auto starves = events_of(out.timeline, EventKind::Starve);
    REQUIRE(starves.size() == 1);
    CHECK(starves[0].at_ns == 500000);  // two futile quanta
    CHECK(events_of(out.timeline, EventKind::Complete).empty());
    CHECK(events_of(out.timeline, EventKind::Save).empty());
}

TEST_CASE("evict-restart completes jobs that fit the quantum") {
    ScenarioConfig sc = scenario_i();
    sc.workload = {JobTemplate{"ml-kem-server", 1, 0, 0, {}}};
    sc.policy = {PolicyKind::RoundRobinEvictRestart, 500000};

    const SimOutput out = simulate_full(sc);
    CHECK(out.final_jobs[0].state == JobState::Completed);
    CHECK(events_of(out.timeline, EventKind::Complete)[0].at_ns == 348060);
    CHECK(events_of(out.timeline, EventKind::Starve).empty());
}

TEST_CASE("service exactly equal to the quantum completes at the boundary") {
    ScenarioConfig sc = scenario_i();
    sc.workload = {JobTemplate{"ml-kem-server", 1, 0, 0, 25000}};  // 250,000 ns
    for (auto kind : {PolicyKind::RoundRobinPreemptive, PolicyKind::RoundRobinEvictRestart}) {
        sc.policy = {kind, 250000};
        const SimOutput out = simulate_full(sc);
        CHECK(out.final_jobs[0].state == JobState::Completed);
        CHECK(events_of(out.timeline, EventKind::Complete)[0].at_ns == 250000);
        CHECK(events_of(out.timeline, EventKind::QuantumExpire).empty());
        CHECK(events_of(out.timeline, EventKind::Starve).empty());
    }
}

TEST_CASE("priority arrivals preempt lower-priority work mid-slice") {
    ScenarioConfig sc;
    sc.fabric = builtin_fabric("1-slot");
    sc.workload = {JobTemplate{"viterbi-decoder", 1, 0, 1, 100000},
                   JobTemplate{"viterbi-decoder", 1, 123450, 9, 20000}};
    sc.policy = {PolicyKind::PriorityPreemptive, {}};
    sc.frame_policy = FrameCountPolicy::single_frame();
    sc.seed = 3;

    const SimOutput out = simulate_full(sc);
    check_timeline_sorted(out.timeline);
    check_slot_exclusivity(out.timeline, sc);

    const auto saves = events_of(out.timeline, EventKind::Save, 1);
    REQUIRE(saves.size() == 1);
    CHECK(saves[0].at_ns == 123450);

    CHECK(events_of(out.timeline, EventKind::Dispatch, 2)[0].at_ns == 154550);
    CHECK(events_of(out.timeline, EventKind::Complete, 2)[0].at_ns == 354550);
    CHECK(events_of(out.timeline, EventKind::Restore, 1)[0].at_ns == 354550);
    CHECK(events_of(out.timeline, EventKind::Complete, 1)[0].at_ns == 1264800);

    CHECK(out.final_jobs[0].switches == 1);
    CHECK(out.final_jobs[1].switches == 0);
    for (const auto& j : out.final_jobs)
        CHECK(j.kernel_state == run_uninterrupted(j.initial_kernel_state, j.service_cycles));
}

TEST_CASE("lower-priority arrivals never preempt") {
    ScenarioConfig sc;
    sc.fabric = builtin_fabric("1-slot");
    sc.workload = {JobTemplate{"viterbi-decoder", 1, 0, 9, 100000},
                   JobTemplate{"viterbi-decoder", 1, 123450, 1, 20000}};
    sc.policy = {PolicyKind::PriorityPreemptive, {}};
    sc.frame_policy = FrameCountPolicy::single_frame();
    sc.seed = 3;

    const SimOutput out = simulate_full(sc);
    CHECK(events_of(out.timeline, EventKind::Save).empty());
    CHECK(events_of(out.timeline, EventKind::Complete, 1)[0].at_ns == 1000000);
    CHECK(events_of(out.timeline, EventKind::Complete, 2)[0].at_ns == 1200000);
}

TEST_CASE("horizon cuts the run and leaves jobs unfinished") {
    ScenarioConfig sc = scenario_i();
    sc.horizon_ns = 1000000;
    const auto tl = simulate(sc);
    for (const auto& e : tl) CHECK(e.at_ns <= 1000000);
    CHECK(events_of(tl, EventKind::Complete).empty());

    const SimReport report = summarize(tl, sc);
    CHECK(report.makespan_ns == 1000000);
    for (const auto& m : report.jobs) CHECK(m.outcome == Outcome::HorizonExceeded);
}

TEST_CASE("multi-slot fabrics run independent jobs concurrently") {
    ScenarioConfig sc;
    sc.fabric = builtin_fabric("3-slot");
    sc.workload = {JobTemplate{"viterbi-decoder", 2, 0, 0, 50000},
                   JobTemplate{"ml-kem-server", 1, 0, 0, {}}};
    sc.policy = {PolicyKind::RoundRobinPreemptive, 250000};
    sc.frame_policy = FrameCountPolicy::single_frame();
    sc.seed = 4;

    const SimOutput out = simulate_full(sc);
    check_slot_exclusivity(out.timeline, sc);
    const auto dispatches = events_of(out.timeline, EventKind::Dispatch);
    REQUIRE(dispatches.size() == 3);
    // all three start at t=0 on distinct slots; smallest fit first
    CHECK(dispatches[0].at_ns == 0);
    CHECK(dispatches[1].at_ns == 0);
    CHECK(dispatches[2].at_ns == 0);
    CHECK(dispatches[0].slot == 1);
    CHECK(dispatches[1].slot == 2);
    CHECK(dispatches[2].slot == 3);
    for (const auto& j : out.final_jobs) CHECK(j.state == JobState::Completed);
}

TEST_CASE("determinism: equal scenarios replay bit-identically") {
    for (const ScenarioConfig& sc : {scenario_i(), scenario_ii()}) {
        const SimOutput a = simulate_full(sc);
        const SimOutput b = simulate_full(sc);
        CHECK(a.timeline == b.timeline);
        REQUIRE(a.final_jobs.size() == b.final_jobs.size());
        for (std::size_t i = 0; i < a.final_jobs.size(); ++i) {
            CHECK(a.final_jobs[i].kernel_state == b.final_jobs[i].kernel_state);
            CHECK(a.final_jobs[i].switches == b.final_jobs[i].switches);
        }
    }
}

TEST_CASE("randomized scenarios keep the core invariants") {
    Xoshiro256 rng(12121);
    const std::vector<std::string> pool{"viterbi-decoder", "iir-filter", "fir-filter",
                                        "image-processor", "mips-processor"};
    for (int iter = 0; iter < 40; ++iter) {
        ScenarioConfig sc;
        sc.fabric = rng.bounded(2) ? builtin_fabric("3-slot") : builtin_fabric("1-slot");
        const int kinds = static_cast<int>(rng.bounded(4));
        switch (kinds) {
            case 0: sc.policy = {PolicyKind::RoundRobinPreemptive,
                                 static_cast<std::int64_t>(10000 + rng.bounded(500000))};
                break;
            case 1: sc.policy = {PolicyKind::RoundRobinEvictRestart,
                                 static_cast<std::int64_t>(10000 + rng.bounded(500000))};
                break;
            case 2: sc.policy = {PolicyKind::RunToCompletion, {}}; break;
            default: sc.policy = {PolicyKind::PriorityPreemptive, {}}; break;
        }
        sc.frame_policy = rng.bounded(2) ? FrameCountPolicy::single_frame()
                                         : FrameCountPolicy::resource_estimate();
        sc.cost_model.reset_ns = static_cast<std::int64_t>(rng.bounded(3) * 500);
        sc.cost_model.reconfig_load_ns = static_cast<std::int64_t>(rng.bounded(3) * 700);
        sc.seed = rng.next();
        const int njobs = 1 + static_cast<int>(rng.bounded(6));
        for (int i = 0; i < njobs; ++i) {
            JobTemplate t;
            t.benchmark = pool[rng.bounded(pool.size())];
            t.count = 1 + static_cast<std::uint32_t>(rng.bounded(3));
            t.arrival_ns = static_cast<std::int64_t>(rng.bounded(400000));
            t.priority = static_cast<int>(rng.bounded(10));
            t.latency_cycles_override = 1000 + rng.bounded(60000);
            sc.workload.push_back(t);
        }

        const SimOutput out = simulate_full(sc);
        check_timeline_sorted(out.timeline);
        check_slot_exclusivity(out.timeline, sc);
        CHECK(simulate(sc) == out.timeline);  // determinism

        const SimReport report = summarize(out.timeline, sc);
        for (std::size_t i = 0; i < out.final_jobs.size(); ++i) {
            const Job& j = out.final_jobs[i];
            const JobMetrics& m = report.jobs[i];
            // every save pairs with a later restore once the job completed
            if (j.state == JobState::Completed) {
                CHECK(events_of(out.timeline, EventKind::Save, j.id).size() == j.switches);
                CHECK(events_of(out.timeline, EventKind::Restore, j.id).size() == j.switches);
            }
            if (j.state == JobState::Completed) {
                // conservation: slice times sum exactly to the service time
                CHECK(m.service_ns == job_service_ns(j));
                CHECK(m.turnaround_ns >= m.service_ns);
                CHECK(m.waiting_ns >= 0);
                CHECK(m.switch_overhead_ns ==
                      static_cast<std::int64_t>(j.switches) *
                          switch_cost(j.frames, sc.cost_model));
                CHECK(j.kernel_state ==
                      run_uninterrupted(j.initial_kernel_state, j.service_cycles));
            }
            if (j.state == JobState::Starved)
                CHECK(sc.policy.kind == PolicyKind::RoundRobinEvictRestart);
        }
        for (const auto& u : report.slot_utilization) {
            CHECK(u.busy_fraction >= 0.0);
            CHECK(u.busy_fraction <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("switch accounting identity under single-slot preemptive RR") {
    // turnaround = service + switches * switch_cost + gap, with the gap being
    // exactly the other jobs' interleaved time; checked on scenario ii.
    const ScenarioConfig sc = scenario_ii();
    const SimReport report = summarize(simulate(sc), sc);
    const JobMetrics& h = report.jobs[0];
    const std::int64_t gap = 3 * 348060;
    CHECK(h.turnaround_ns == h.service_ns + h.switch_overhead_ns + gap);
    CHECK(h.waiting_ns == gap);
}
