// Command-line front end for the FPGA preemption scheduling simulator.
// Thin shell: every behavior here is reachable through the library headers.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fpsim/fpsim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitStarvation = 3;

/// Write-then-rename so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw fpsim::ConfigError("cannot write '" + tmp + "'");
        out << content;
        if (!out) throw fpsim::ConfigError("write to '" + tmp + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void apply_env_seed(fpsim::ScenarioConfig& sc) {
    if (const char* env = std::getenv("FPS_SEED")) {
        sc.seed = std::strtoull(env, nullptr, 10);
    }
}

int cmd_catalog_list() {
    std::printf("%-34s %-15s %-22s %7s %7s %6s %5s %10s %8s\n", "name", "kind", "class", "luts",
                "ffs", "brams", "dsps", "cycles", "code-kb");
    for (const auto& b : fpsim::builtin_catalog()) {
        std::printf("%-34s %-15s %-22s %7" PRIu64 " %7" PRIu64 " %6" PRIu64 " %5" PRIu64
                    " %10s %8s\n",
                    b.name.c_str(), to_string(b.kind), to_string(b.domain_class),
                    b.resources.luts, b.resources.ffs, b.resources.brams, b.resources.dsps,
                    b.latency_cycles ? std::to_string(*b.latency_cycles).c_str() : "-",
                    b.code_size_kb ? std::to_string(*b.code_size_kb).c_str() : "-");
    }
    return kExitOk;
}

int cmd_catalog_show(const std::string& name) {
    const auto* b = fpsim::find_benchmark(fpsim::builtin_catalog(), name);
    if (!b) throw fpsim::NotFoundError("no builtin benchmark named '" + name + "'");
    std::printf("name:        %s\n", b->name.c_str());
    std::printf("label:       %s\n", b->label.c_str());
    std::printf("kind:        %s\n", to_string(b->kind));
    std::printf("class:       %s\n", to_string(b->domain_class));
    std::printf("resources:   %s\n", to_string(b->resources).c_str());
    std::printf("clock_mhz:   %g\n", b->clock_mhz);
    if (b->latency_cycles) {
        std::printf("latency:     %" PRIu64 " cycles (%s)\n", *b->latency_cycles,
                    b->latency_provenance == fpsim::LatencyProvenance::Measured
                        ? "measured"
                        : "user-supplied");
    } else {
        std::printf("latency:     unset (supply latency_cycles_override in scenarios)\n");
    }
    if (b->code_size_kb) std::printf("code_size:   %u KB\n", *b->code_size_kb);
    for (const auto& fabric : fpsim::builtin_fabrics()) {
        for (const auto& w : fpsim::validate_spec(*b, fabric)) {
            std::printf("warning:     %s\n", w.message.c_str());
        }
    }
    return kExitOk;
}

void write_report(const fpsim::SimReport& report, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << fpsim::render_json(report);
        return;
    }
    if (ends_with(out_path, ".csv")) {
        write_file_atomic(out_path, fpsim::render_csv(report));
    } else if (ends_with(out_path, ".json")) {
        write_file_atomic(out_path, fpsim::render_json(report));
    } else {
        throw fpsim::ConfigError("--out must end in .csv or .json");
    }
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_path,
                 const std::string& timeline_path, bool fail_on_starvation) {
    fpsim::ScenarioConfig sc = fpsim::load_scenario_file(scenario_path);
    apply_env_seed(sc);
    const fpsim::RunResult result = fpsim::run(sc);
    write_report(result.report, out_path);
    if (!timeline_path.empty())
        write_file_atomic(timeline_path, fpsim::render_timeline(result.timeline));
    std::fprintf(stderr,
                 "simulate: %zu jobs, makespan %" PRId64 " ns, %" PRIu64 " switches, %" PRIu64
                 " starved\n",
                 result.report.jobs.size(), result.report.makespan_ns,
                 result.report.total_switches, result.report.starved_count);
    if (fail_on_starvation && result.report.starved_count > 0) return kExitStarvation;
    return kExitOk;
}

int cmd_verify(std::uint64_t steps, std::uint64_t preemptions, std::uint64_t trials,
               std::uint64_t seed, bool tamper) {
    fpsim::SplitMix64 mix(seed);
    std::uint64_t passed = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        const std::uint64_t kernel_seed = mix.next();
        const std::uint64_t plan_seed = mix.next();
        const auto plan = fpsim::random_plan(plan_seed, steps, preemptions);
        fpsim::ContextStore store(std::nullopt, plan_seed);
        fpsim::Key128 key{};
        fpsim::Xoshiro256 key_rng(mix.next());
        key_rng.fill_bytes(key.data(), key.size());

        if (tamper) {
            if (preemptions == 0)
                throw fpsim::ConfigError("--tamper needs at least one preemption");
            fpsim::Xoshiro256 trng(mix.next());
            const std::uint64_t target = trng.bounded(plan.points.size());
            std::uint64_t seen = 0;
            bool caught = false;
            try {
                fpsim::run_with_preemptions(kernel_seed, steps, plan, store, key,
                                            [&](std::vector<std::uint8_t>& blob) {
                                                if (seen++ != target) return;
                                                const std::uint64_t bit =
                                                    trng.bounded(blob.size() * 8);
                                                blob[bit / 8] ^=
                                                    static_cast<std::uint8_t>(1u << (bit % 8));
                                            });
            } catch (const fpsim::IntegrityError&) {
                caught = true;
            }
            if (!caught) {
                std::fprintf(stderr, "verify: trial %" PRIu64 " corruption went UNDETECTED\n",
                             trial);
                return kExitInternal;
            }
            ++passed;
        } else {
            const std::uint64_t expect = fpsim::run_uninterrupted(kernel_seed, steps);
            const std::uint64_t got =
                fpsim::run_with_preemptions(kernel_seed, steps, plan, store, key);
            if (got != expect) {
                std::fprintf(stderr,
                             "verify: trial %" PRIu64 " MISMATCH (got %016" PRIx64
                             ", want %016" PRIx64 ")\n",
                             trial, got, expect);
                return kExitInternal;
            }
            ++passed;
        }
    }
    if (tamper) {
        std::printf("verify --tamper: %" PRIu64 "/%" PRIu64 " corruptions raised IntegrityError\n",
                    passed, trials);
    } else {
        std::printf("verify: %" PRIu64 "/%" PRIu64
                    " preempted runs match the uninterrupted reference\n",
                    passed, trials);
    }
    return kExitOk;
}

int cmd_sweep(const std::string& scenario_path, const std::vector<std::int64_t>& quanta,
              const std::string& out_dir) {
    if (quanta.empty()) throw fpsim::ConfigError("--quantum-list must not be empty");
    fpsim::ScenarioConfig base = fpsim::load_scenario_file(scenario_path);
    apply_env_seed(base);
    if (!base.policy.quantum_based())
        throw fpsim::ConfigError("sweep requires a quantum-based policy");
    std::filesystem::create_directories(out_dir);

    std::string summary = "quantum_ns,makespan_ns,total_overhead_ns,starved_count\n";
    int worst = kExitOk;
    for (const std::int64_t q : quanta) {
        fpsim::ScenarioConfig sc = base;
        sc.policy.quantum_ns = q;
        try {
            const fpsim::RunResult result = fpsim::run(sc);
            std::int64_t total_overhead = 0;
            for (const auto& m : result.report.jobs) total_overhead += m.switch_overhead_ns;
            summary += std::to_string(q) + "," + std::to_string(result.report.makespan_ns) +
                       "," + std::to_string(total_overhead) + "," +
                       std::to_string(result.report.starved_count) + "\n";
            write_file_atomic(out_dir + "/report-q" + std::to_string(q) + ".json",
                              fpsim::render_json(result.report));
        } catch (const fpsim::Error& e) {
            std::fprintf(stderr, "sweep: quantum %" PRId64 ": %s\n", q, e.what());
            worst = std::max(worst, kExitConfig);
        }
    }
    write_file_atomic(out_dir + "/sweep-summary.csv", summary);
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic multi-tenant FPGA preemption scheduling simulator"};
    app.require_subcommand(1);

    auto* list_cmd = app.add_subcommand("catalog-list", "List the bundled benchmark catalog");

    std::string show_name;
    auto* show_cmd = app.add_subcommand("catalog-show", "Show one bundled benchmark");
    show_cmd->add_option("name", show_name, "benchmark identifier")->required();

    std::string sim_scenario, sim_out, sim_timeline;
    bool fail_on_starvation = false;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario file");
    sim_cmd->add_option("scenario", sim_scenario, "scenario file (JSON)")->required();
    sim_cmd->add_option("--out", sim_out, "report path (.csv or .json; default: JSON to stdout)");
    sim_cmd->add_option("--timeline", sim_timeline, "write the event timeline (one JSON object per line)");
    sim_cmd->add_flag("--fail-on-starvation", fail_on_starvation,
                      "exit 3 if any job starves");

    std::uint64_t vr_steps = 100000, vr_preemptions = 10, vr_trials = 100, vr_seed = 42;
    bool vr_tamper = false;
    auto* verify_cmd =
        app.add_subcommand("verify", "Preemption-correctness harness (save/reset/restore)");
    verify_cmd->add_option("--steps", vr_steps, "chained kernel steps per trial");
    verify_cmd->add_option("--preemptions", vr_preemptions, "preemption points per trial");
    verify_cmd->add_option("--trials", vr_trials, "number of randomized trials");
    verify_cmd->add_option("--seed", vr_seed, "trial seed");
    verify_cmd->add_flag("--tamper", vr_tamper,
                         "flip one sealed-blob bit per trial and require IntegrityError");

    std::string sweep_scenario, sweep_out_dir = "sweep-out";
    std::vector<std::int64_t> sweep_quanta;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario across several quanta");
    sweep_cmd->add_option("scenario", sweep_scenario, "base scenario file")->required();
    sweep_cmd->add_option("--quantum-list", sweep_quanta, "quantum values in ns")
        ->delimiter(',');
    sweep_cmd->add_option("--out-dir", sweep_out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) return cmd_catalog_list();
        if (show_cmd->parsed()) return cmd_catalog_show(show_name);
        if (sim_cmd->parsed())
            return cmd_simulate(sim_scenario, sim_out, sim_timeline, fail_on_starvation);
        if (verify_cmd->parsed())
            return cmd_verify(vr_steps, vr_preemptions, vr_trials, vr_seed, vr_tamper);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_scenario, sweep_quanta, sweep_out_dir);
    } catch (const fpsim::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const fpsim::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const fpsim::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const fpsim::NotFoundError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const fpsim::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInternal;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInternal;
    }
    return kExitOk;
}
