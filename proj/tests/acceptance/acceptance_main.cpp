// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Values are pinned integers; tolerances appear only where a
// criterion states one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fpsim/fpsim.hpp"

namespace {

int g_failures = 0;

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }

    template <typename T>
    void expect_eq(const T& got, const T& want, const std::string& what) {
        if (got != want && ok) {
            ok = false;
            detail = what + " (got " + std::to_string(got) + ", want " + std::to_string(want) +
                     ")";
        }
    }
};

void criterion(int n, const std::string& name, double budget_s,
               const std::function<void(Check&)>& body) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0 && elapsed >= budget_s)
        c.expect(false, "runtime " + std::to_string(elapsed) + " s exceeds budget");
    if (c.ok) {
        std::printf("PASS  criterion %2d: %s  (%.2fs)\n", n, name.c_str(), elapsed);
    } else {
        std::printf("FAIL  criterion %2d: %s — %s\n", n, name.c_str(), c.detail.c_str());
        ++g_failures;
    }
}

const std::string kData = FPSIM_DATA_DIR;

fpsim::Key128 key_from(std::uint64_t seed) {
    fpsim::Key128 k{};
    fpsim::Xoshiro256 rng(seed);
    rng.fill_bytes(k.data(), k.size());
    return k;
}

}  // namespace

int main() {
    using namespace fpsim;

    criterion(1, "scenario i: 100 ML-KEM jobs, RR quantum 0.25 ms, exact sums", 1.0,
              [](Check& c) {
                  const ScenarioConfig sc = load_scenario_file(kData + "/scenario-i.json");
                  const RunResult r = run(sc);
                  c.expect_eq<std::int64_t>(r.report.makespan_ns, 41286000, "makespan_ns");
                  c.expect_eq<std::size_t>(r.report.jobs.size(), 100, "job count");
                  for (const auto& m : r.report.jobs) {
                      c.expect_eq<std::uint64_t>(m.switches, 1, "switches");
                      c.expect_eq<std::int64_t>(m.service_ns + m.switch_overhead_ns, 412860,
                                                "completion effort");
                      c.expect(m.outcome == Outcome::Completed, "job not completed");
                  }
              });

    criterion(2, "scenario ii: H.264 + ML-KEM stream, RR quantum 0.5 ms, exact sums", 1.0,
              [](Check& c) {
                  const ScenarioConfig sc = load_scenario_file(kData + "/scenario-ii.json");
                  const RunResult r = run(sc);
                  const JobMetrics& h = r.report.jobs.at(0);
                  c.expect(h.benchmark == "h264-encoder", "job 1 is not the H.264 encoder");
                  c.expect_eq<std::int64_t>(h.turnaround_ns, 2948870, "H.264 turnaround_ns");
                  c.expect_eq<std::uint64_t>(h.switches, 3, "H.264 switches");
                  c.expect_eq<std::int64_t>(h.switch_overhead_ns, 194400,
                                            "H.264 switch overhead");
                  for (std::size_t i = 1; i < r.report.jobs.size(); ++i)
                      c.expect_eq<std::uint64_t>(r.report.jobs[i].switches, 0,
                                                 "ML-KEM switches");
              });

    criterion(3, "scenario ii: H.264 overhead ratio 0.1137 +/- 0.0005", 1.0, [](Check& c) {
        const ScenarioConfig sc = load_scenario_file(kData + "/scenario-ii.json");
        const RunResult r = run(sc);
        const double pct = r.report.jobs.at(0).overhead_pct;
        c.expect(std::fabs(pct - 0.1137) <= 0.0005,
                 "overhead_pct " + std::to_string(pct) + " outside 0.1137 +/- 0.0005");
    });

    criterion(4, "scenario i under evict-restart: all 100 jobs starve", 1.0, [](Check& c) {
        ScenarioConfig sc = load_scenario_file(kData + "/scenario-i.json");
        sc.policy.kind = PolicyKind::RoundRobinEvictRestart;
        const RunResult r = run(sc);
        c.expect_eq<std::uint64_t>(r.report.starved_count, 100, "starved_count");
        std::size_t completed = 0;
        for (const auto& m : r.report.jobs)
            if (m.outcome == Outcome::Completed) ++completed;
        c.expect_eq<std::size_t>(completed, 0, "completed count");
    });

    criterion(5, "cost-model constants: 31,100 / 33,700 / 64,800 ns per frame", 0, [](Check& c) {
        const SwitchCostModel defaults;
        c.expect_eq<std::int64_t>(save_cost(1, defaults), 31100, "save_cost(1)");
        c.expect_eq<std::int64_t>(restore_cost(1, defaults), 33700, "restore_cost(1)");
        c.expect_eq<std::int64_t>(switch_cost(1, defaults), 64800, "switch_cost(1)");
    });

    criterion(6, "frame geometry: 101 x 32-bit words (3,232 bits); UltraScale 123", 0,
              [](Check& c) {
                  const FrameModel seven;
                  c.expect_eq<std::uint32_t>(seven.words_per_frame, 101, "words_per_frame");
                  c.expect_eq<std::uint32_t>(seven.word_bits, 32, "word_bits");
                  c.expect_eq<std::uint64_t>(seven.frame_bits(), 3232, "frame_bits");
                  c.expect_eq<std::uint32_t>(FrameModel::ultrascale().words_per_frame, 123,
                                             "ultrascale words_per_frame");
              });

    criterion(7, "preemption transparency: 100 trials x 1e5 steps x 10 preemptions", 30.0,
              [](Check& c) {
                  SplitMix64 mix(2026);
                  for (int trial = 0; trial < 100; ++trial) {
                      const std::uint64_t seed = mix.next();
                      const auto plan = random_plan(mix.next(), 100000, 10);
                      ContextStore store(std::nullopt, mix.next());
                      const std::uint64_t got =
                          run_with_preemptions(seed, 100000, plan, store, key_from(mix.next()));
                      const std::uint64_t want = run_uninterrupted(seed, 100000);
                      if (got != want) {
                          c.expect(false, "trial " + std::to_string(trial) + " mismatch");
                          return;
                      }
                  }
              });

    criterion(8, "integrity: 1,000 tampered blobs abort, 1,000 clean blobs restore", 30.0,
              [](Check& c) {
                  Xoshiro256 rng(31337);
                  const FrameModel model;
                  for (int i = 0; i < 1000; ++i) {
                      RuntimeState st;
                      st.job_id = static_cast<std::uint32_t>(rng.bounded(100));
                      st.slot_id = static_cast<std::uint32_t>(rng.bounded(4));
                      st.captured_at_ns = static_cast<std::int64_t>(rng.bounded(1ull << 40));
                      st.remaining_cycles = rng.next();
                      st.kernel_state = rng.next();
                      const Key128 key = key_from(rng.next());
                      Nonce128 nonce;
                      rng.fill_bytes(nonce.data(), nonce.size());
                      const ContextImage img = capture(st, model, 1 + rng.bounded(3));
                      const auto blob = seal_bytes(img, key, nonce);

                      // clean round-trip restores the exact state
                      const RuntimeState back = restore(unseal_bytes(blob, key), model);
                      if (!(back == st)) {
                          c.expect(false, "clean round-trip diverged at i=" + std::to_string(i));
                          return;
                      }

                      // single random bit flip must raise IntegrityError
                      auto mutated = blob;
                      const std::uint64_t bit = rng.bounded(mutated.size() * 8);
                      mutated[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
                      bool caught = false;
                      try {
                          unseal_bytes(mutated, key);
                      } catch (const IntegrityError&) {
                          caught = true;
                      }
                      if (!caught) {
                          c.expect(false, "tamper undetected at i=" + std::to_string(i) +
                                              " bit " + std::to_string(bit));
                          return;
                      }
                  }
              });

    criterion(9, "region disjointness over 10,000 random allocation sequences", 30.0,
              [](Check& c) {
                  Xoshiro256 rng(424242);
                  for (int seq = 0; seq < 10000; ++seq) {
                      ContextStore store;
                      FrameModel model;
                      model.words_per_frame = 7 + static_cast<std::uint32_t>(rng.bounded(200));
                      model.crc_word_index = 6;
                      const int n = 1 + static_cast<int>(rng.bounded(20));
                      for (int i = 0; i < n; ++i)
                          store.allocate_region(1 + rng.bounded(64), model);
                      const auto& regions = store.regions();
                      for (std::size_t a = 0; a < regions.size(); ++a) {
                          for (std::size_t b = a + 1; b < regions.size(); ++b) {
                              const bool disjoint =
                                  regions[a].end() <= regions[b].base ||
                                  regions[b].end() <= regions[a].base;
                              if (!disjoint) {
                                  c.expect(false, "overlap in sequence " + std::to_string(seq));
                                  return;
                              }
                          }
                      }
                  }
              });

    criterion(10, "catalog fidelity against the golden transcription", 0, [](Check& c) {
        const auto golden = parse_catalog(read_text_file(kData + "/builtin-catalog.json"));
        const auto& builtin = builtin_catalog();
        c.expect_eq<std::size_t>(builtin.size(), 27, "builtin size");
        c.expect(golden == builtin, "builtin catalog differs from the golden file");
        for (const auto& b : builtin) {
            if (b.kind == BenchmarkKind::RiscvSoftcore)
                c.expect(b.code_size_kb.has_value(), b.name + " missing code size");
        }
        const auto* mm = find_benchmark(builtin, "matrix-multiplication");
        c.expect(mm != nullptr, "matrix-multiplication missing");
        if (mm) {
            for (const auto& fabric : builtin_fabrics()) {
                const auto warnings = validate_spec(*mm, fabric);
                c.expect(warnings.size() == 1 &&
                             warnings[0].kind == CatalogWarning::Kind::NoFittingSlot,
                         "matrix-multiplication not flagged on fabric " + fabric.name);
            }
        }
    });

    criterion(11, "determinism: identical scenario, byte-identical outputs", 5.0, [](Check& c) {
        for (const char* name : {"/scenario-i.json", "/scenario-ii.json"}) {
            const ScenarioConfig sc = load_scenario_file(kData + name);
            const RunResult a = run(sc);
            const RunResult b = run(sc);
            c.expect(render_json(a.report) == render_json(b.report),
                     std::string(name) + ": report bytes differ");
            c.expect(render_csv(a.report) == render_csv(b.report),
                     std::string(name) + ": CSV bytes differ");
            c.expect(render_timeline(a.timeline) == render_timeline(b.timeline),
                     std::string(name) + ": timeline bytes differ");
        }
    });

    if (g_failures == 0) {
        std::printf("acceptance: all 11 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return 1;
}
