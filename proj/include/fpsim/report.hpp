#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpsim/engine.hpp"
#include "fpsim/errors.hpp"

namespace fpsim {

enum class Outcome { Completed, Starved, HorizonExceeded };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Completed: return "completed";
        case Outcome::Starved: return "starved";
        case Outcome::HorizonExceeded: return "horizon-exceeded";
    }
    return "?";
}

inline Outcome parse_outcome(const std::string& s) {
    if (s == "completed") return Outcome::Completed;
    if (s == "starved") return Outcome::Starved;
    if (s == "horizon-exceeded") return Outcome::HorizonExceeded;
    throw ParseError("unknown outcome '" + s + "'");
}

struct JobMetrics {
    std::uint32_t job_id = 0;
    std::string benchmark;
    Outcome outcome = Outcome::Completed;
    std::int64_t turnaround_ns = 0;
    std::int64_t waiting_ns = 0;
    std::int64_t service_ns = 0;
    std::uint64_t switches = 0;
    std::int64_t switch_overhead_ns = 0;
    double overhead_pct = 0.0;  // ratio, not a rounded percentage

    friend bool operator==(const JobMetrics&, const JobMetrics&) = default;
};

struct SlotUtilization {
    int slot_id = 0;
    double busy_fraction = 0.0;      // execution plus save/reset/restore time
    double overhead_fraction = 0.0;  // save/reset/restore share alone

    friend bool operator==(const SlotUtilization&, const SlotUtilization&) = default;
};

struct SimReport {
    std::vector<JobMetrics> jobs;
    std::int64_t makespan_ns = 0;
    std::uint64_t total_switches = 0;
    std::vector<SlotUtilization> slot_utilization;
    std::uint64_t starved_count = 0;

    friend bool operator==(const SimReport&, const SimReport&) = default;
};

/// Computes every metric from the event timeline alone (plus the scenario for
/// cost constants and job static data). Execution intervals close at
/// quantum-expire / save / complete marks; save, reset and restore intervals
/// count as slot-busy time with the overhead share reported separately.
inline SimReport summarize(const std::vector<ScheduleEvent>& timeline,
                           const ScenarioConfig& scenario) {
    const std::vector<Job> jobs = expand_workload(scenario);

    struct JobAcc {
        std::optional<std::int64_t> run_start;
        std::int64_t service = 0;
        std::uint64_t switches = 0;
        std::optional<std::int64_t> completed_at;
        std::optional<std::int64_t> starved_at;
    };
    std::vector<JobAcc> acc(jobs.size());
    std::map<int, std::int64_t> slot_exec, slot_overhead;
    for (const auto& s : scenario.fabric.slots) {
        slot_exec[s.id] = 0;
        slot_overhead[s.id] = 0;
    }

    std::int64_t last_event = 0;
    for (const auto& ev : timeline) {
        last_event = std::max(last_event, ev.at_ns);
        if (ev.kind == EventKind::Arrive) continue;
        JobAcc& a = acc[ev.job - 1];
        const Job& j = jobs[ev.job - 1];
        const int slot = ev.slot.value_or(0);
        auto close_exec = [&](std::int64_t at) {
            if (!a.run_start) return;
            a.service += at - *a.run_start;
            slot_exec[slot] += at - *a.run_start;
            a.run_start.reset();
        };
        switch (ev.kind) {
            case EventKind::Dispatch:
                a.run_start = ev.at_ns;
                break;
            case EventKind::Restore: {
                const std::int64_t total = restore_cost(j.frames, scenario.cost_model) +
                                           scenario.cost_model.reconfig_load_ns;
                a.run_start = ev.at_ns + total;
                slot_overhead[slot] += total;
                ++a.switches;
                break;
            }
            case EventKind::QuantumExpire:
                close_exec(ev.at_ns);
                a.run_start = ev.at_ns;  // reopened unless a save/reset follows
                break;
            case EventKind::Save:
                close_exec(ev.at_ns);
                slot_overhead[slot] += save_cost(j.frames, scenario.cost_model);
                break;
            case EventKind::Reset:
                close_exec(ev.at_ns);
                slot_overhead[slot] += scenario.cost_model.reset_ns;
                break;
            case EventKind::Complete:
                close_exec(ev.at_ns);
                a.completed_at = ev.at_ns;
                break;
            case EventKind::Starve:
                a.starved_at = ev.at_ns;
                break;
            case EventKind::Arrive:
                break;
        }
    }

    SimReport report;
    bool any_unfinished = false;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!acc[i].completed_at && !acc[i].starved_at) any_unfinished = true;
    }
    report.makespan_ns = (any_unfinished && scenario.horizon_ns) ? *scenario.horizon_ns
                                                                 : last_event;

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Job& j = jobs[i];
        const JobAcc& a = acc[i];
        JobMetrics m;
        m.job_id = j.id;
        m.benchmark = j.benchmark;
        m.switches = a.switches;
        m.switch_overhead_ns =
            static_cast<std::int64_t>(a.switches) * switch_cost(j.frames, scenario.cost_model);
        m.service_ns = a.service;
        if (a.completed_at) {
            m.outcome = Outcome::Completed;
            m.turnaround_ns = *a.completed_at - j.arrival_ns;
        } else if (a.starved_at) {
            m.outcome = Outcome::Starved;
            m.turnaround_ns = *a.starved_at - j.arrival_ns;
        } else {
            m.outcome = Outcome::HorizonExceeded;
            m.turnaround_ns = report.makespan_ns - j.arrival_ns;
        }
        m.waiting_ns = m.turnaround_ns - m.service_ns - m.switch_overhead_ns;
        m.overhead_pct = m.service_ns > 0 ? static_cast<double>(m.switch_overhead_ns) /
                                                static_cast<double>(m.service_ns)
                                          : 0.0;
        report.total_switches += m.switches;
        if (m.outcome == Outcome::Starved) ++report.starved_count;
        report.jobs.push_back(std::move(m));
    }

    for (const auto& s : scenario.fabric.slots) {
        SlotUtilization u;
        u.slot_id = s.id;
        if (report.makespan_ns > 0) {
            u.busy_fraction =
                static_cast<double>(slot_exec[s.id] + slot_overhead[s.id]) /
                static_cast<double>(report.makespan_ns);
            u.overhead_fraction = static_cast<double>(slot_overhead[s.id]) /
                                  static_cast<double>(report.makespan_ns);
        }
        report.slot_utilization.push_back(u);
    }
    return report;
}

struct RunResult {
    SimReport report;
    std::vector<ScheduleEvent> timeline;
};

/// Simulates and summarizes in one call.
inline RunResult run(const ScenarioConfig& scenario) {
    RunResult result;
    result.timeline = simulate(scenario);
    result.report = summarize(result.timeline, scenario);
    return result;
}

// --- rendering ---------------------------------------------------------------

namespace detail {

/// Shortest round-trip decimal form; byte-deterministic.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("bad number '" + s + "'");
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace detail

inline constexpr const char* kReportCsvHeader =
    "job_id,benchmark,outcome,turnaround_ns,waiting_ns,service_ns,switches,"
    "switch_overhead_ns,overhead_pct";

inline std::string render_csv(const SimReport& report) {
    std::string out = kReportCsvHeader;
    out.push_back('\n');
    for (const auto& m : report.jobs) {
        out += std::to_string(m.job_id);
        out.push_back(',');
        out += m.benchmark;
        out.push_back(',');
        out += to_string(m.outcome);
        out.push_back(',');
        out += std::to_string(m.turnaround_ns);
        out.push_back(',');
        out += std::to_string(m.waiting_ns);
        out.push_back(',');
        out += std::to_string(m.service_ns);
        out.push_back(',');
        out += std::to_string(m.switches);
        out.push_back(',');
        out += std::to_string(m.switch_overhead_ns);
        out.push_back(',');
        out += detail::format_double(m.overhead_pct);
        out.push_back('\n');
    }
    return out;
}

/// Parses the per-job rows back; the inverse of render_csv's row section.
inline std::vector<JobMetrics> parse_metrics_csv(const std::string& text) {
    std::vector<JobMetrics> rows;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        if (first) {
            if (line != kReportCsvHeader) throw ParseError("bad report CSV header");
            first = false;
            continue;
        }
        const auto f = detail::split_csv_line(line);
        if (f.size() != 9) throw ParseError("bad report CSV row: '" + line + "'");
        JobMetrics m;
        m.job_id = static_cast<std::uint32_t>(std::stoul(f[0]));
        m.benchmark = f[1];
        m.outcome = parse_outcome(f[2]);
        m.turnaround_ns = std::stoll(f[3]);
        m.waiting_ns = std::stoll(f[4]);
        m.service_ns = std::stoll(f[5]);
        m.switches = std::stoull(f[6]);
        m.switch_overhead_ns = std::stoll(f[7]);
        m.overhead_pct = detail::parse_double(f[8]);
        rows.push_back(std::move(m));
    }
    if (first) throw ParseError("report CSV is empty");
    return rows;
}

inline nlohmann::json to_json(const JobMetrics& m) {
    return nlohmann::json{{"job_id", m.job_id},
                          {"benchmark", m.benchmark},
                          {"outcome", to_string(m.outcome)},
                          {"turnaround_ns", m.turnaround_ns},
                          {"waiting_ns", m.waiting_ns},
                          {"service_ns", m.service_ns},
                          {"switches", m.switches},
                          {"switch_overhead_ns", m.switch_overhead_ns},
                          {"overhead_pct", m.overhead_pct}};
}

inline std::string render_json(const SimReport& report) {
    nlohmann::json jobs = nlohmann::json::array();
    for (const auto& m : report.jobs) jobs.push_back(to_json(m));
    nlohmann::json util = nlohmann::json::array();
    for (const auto& u : report.slot_utilization) {
        util.push_back(nlohmann::json{{"slot_id", u.slot_id},
                                      {"busy_fraction", u.busy_fraction},
                                      {"overhead_fraction", u.overhead_fraction}});
    }
    const nlohmann::json doc{{"jobs", std::move(jobs)},
                             {"makespan_ns", report.makespan_ns},
                             {"total_switches", report.total_switches},
                             {"slot_utilization", std::move(util)},
                             {"starved_count", report.starved_count}};
    return doc.dump(2) + "\n";
}

inline SimReport parse_report_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
    SimReport r;
    r.makespan_ns = doc.at("makespan_ns").get<std::int64_t>();
    r.total_switches = doc.at("total_switches").get<std::uint64_t>();
    r.starved_count = doc.at("starved_count").get<std::uint64_t>();
    for (const auto& e : doc.at("jobs")) {
        JobMetrics m;
        m.job_id = e.at("job_id").get<std::uint32_t>();
        m.benchmark = e.at("benchmark").get<std::string>();
        m.outcome = parse_outcome(e.at("outcome").get<std::string>());
        m.turnaround_ns = e.at("turnaround_ns").get<std::int64_t>();
        m.waiting_ns = e.at("waiting_ns").get<std::int64_t>();
        m.service_ns = e.at("service_ns").get<std::int64_t>();
        m.switches = e.at("switches").get<std::uint64_t>();
        m.switch_overhead_ns = e.at("switch_overhead_ns").get<std::int64_t>();
        m.overhead_pct = e.at("overhead_pct").get<double>();
        r.jobs.push_back(std::move(m));
    }
    for (const auto& e : doc.at("slot_utilization")) {
        SlotUtilization u;
        u.slot_id = e.at("slot_id").get<int>();
        u.busy_fraction = e.at("busy_fraction").get<double>();
        u.overhead_fraction = e.at("overhead_fraction").get<double>();
        r.slot_utilization.push_back(u);
    }
    return r;
}

/// One compact JSON object per event, in timeline order.
inline std::string render_timeline(const std::vector<ScheduleEvent>& events) {
    std::string out;
    for (const auto& ev : events) {
        nlohmann::json e{{"at_ns", ev.at_ns},
                         {"kind", to_string(ev.kind)},
                         {"job", ev.job}};
        if (ev.slot) {
            e["slot"] = *ev.slot;
        } else {
            e["slot"] = nullptr;
        }
        out += e.dump();
        out.push_back('\n');
    }
    return out;
}

inline EventKind parse_event_kind(const std::string& s) {
    for (auto k : {EventKind::Arrive, EventKind::Dispatch, EventKind::QuantumExpire,
                   EventKind::Save, EventKind::Reset, EventKind::Restore,
                   EventKind::Complete, EventKind::Starve}) {
        if (s == to_string(k)) return k;
    }
    throw ParseError("unknown event kind '" + s + "'");
}

inline std::vector<ScheduleEvent> parse_timeline(const std::string& text) {
    std::vector<ScheduleEvent> events;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        nlohmann::json e;
        try {
            e = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& err) {
            throw ParseError(std::string("timeline: ") + err.what());
        }
        ScheduleEvent ev;
        ev.at_ns = e.at("at_ns").get<std::int64_t>();
        ev.kind = parse_event_kind(e.at("kind").get<std::string>());
        ev.job = e.at("job").get<std::uint32_t>();
        if (!e.at("slot").is_null()) ev.slot = e.at("slot").get<int>();
        events.push_back(ev);
    }
    return events;
}

}  // namespace fpsim
