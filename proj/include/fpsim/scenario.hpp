#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "fpsim/engine.hpp"
#include "fpsim/errors.hpp"

namespace fpsim {

namespace detail {

using nlohmann::json;

inline std::int64_t get_i64(const json& obj, const char* key, const std::string& path) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError(path + "." + key + ": must be an integer");
    return v.get<std::int64_t>();
}

inline void require_scenario_keys(const json& obj, std::initializer_list<const char*> allowed,
                                  const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) throw ConfigError(path + "." + it.key() + ": unknown field");
    }
}

inline FabricConfig parse_fabric_json(const json& f, const std::string& path) {
    if (!f.is_object()) throw ConfigError(path + ": must be an object");
    require_scenario_keys(f, {"name", "slots"}, path);
    FabricConfig fabric;
    fabric.name = f.contains("name") ? f.at("name").get<std::string>() : "custom";
    if (!f.contains("slots") || !f.at("slots").is_array())
        throw ConfigError(path + ".slots: must be an array");
    std::size_t i = 0;
    for (const auto& s : f.at("slots")) {
        const std::string spath = path + ".slots[" + std::to_string(i++) + "]";
        require_scenario_keys(s, {"id", "capacity", "region_label"}, spath);
        Slot slot;
        slot.id = static_cast<int>(get_i64(s, "id", spath));
        try {
            slot.capacity = parse_resources(s.at("capacity"), spath + ".capacity");
        } catch (const ValidationError& e) {
            throw ConfigError(e.what());
        }
        if (s.contains("region_label")) slot.region_label = s.at("region_label").get<std::string>();
        fabric.slots.push_back(std::move(slot));
    }
    try {
        fabric.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return fabric;
}

inline nlohmann::json render_fabric_json(const FabricConfig& fabric) {
    json slots = json::array();
    for (const auto& s : fabric.slots) {
        json e{{"id", s.id}, {"capacity", render_resources(s.capacity)}};
        if (!s.region_label.empty()) e["region_label"] = s.region_label;
        slots.push_back(std::move(e));
    }
    return json{{"name", fabric.name}, {"slots", std::move(slots)}};
}

inline FrameModel parse_frame_model_json(const json& m, const std::string& path) {
    require_scenario_keys(m,
                          {"preset", "words_per_frame", "word_bits", "crc_word_index",
                           "luts_per_frame", "ffs_per_frame", "extra_frames"},
                          path);
    FrameModel model;
    if (m.contains("preset")) {
        const auto p = m.at("preset").get<std::string>();
        if (p == "7-series") {
            model = FrameModel::seven_series();
        } else if (p == "ultrascale") {
            model = FrameModel::ultrascale();
        } else {
            throw ConfigError(path + ".preset: expected \"7-series\" or \"ultrascale\"");
        }
    }
    auto set = [&](const char* key, std::uint32_t& field) {
        if (m.contains(key)) field = static_cast<std::uint32_t>(get_i64(m, key, path));
    };
    set("words_per_frame", model.words_per_frame);
    set("word_bits", model.word_bits);
    set("crc_word_index", model.crc_word_index);
    set("luts_per_frame", model.luts_per_frame);
    set("ffs_per_frame", model.ffs_per_frame);
    set("extra_frames", model.extra_frames);
    try {
        model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return model;
}

}  // namespace detail

/// Parses a scenario document. See the bundled data/scenario-*.json files for
/// worked examples of the schema.
inline ScenarioConfig parse_scenario(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("scenario: top level must be an object");
    detail::require_scenario_keys(doc,
                                  {"fabric", "fabric_ref", "workload", "policy", "frame_policy",
                                   "frame_model", "cost_model", "seed", "horizon_ns"},
                                  "scenario");

    ScenarioConfig sc;

    const bool has_inline = doc.contains("fabric");
    const bool has_ref = doc.contains("fabric_ref");
    if (has_inline == has_ref)
        throw ConfigError("scenario: exactly one of fabric / fabric_ref is required");
    if (has_ref) {
        try {
            sc.fabric = builtin_fabric(doc.at("fabric_ref").get<std::string>());
        } catch (const NotFoundError& e) {
            throw ConfigError(std::string("scenario.fabric_ref: ") + e.what());
        }
    } else {
        sc.fabric = detail::parse_fabric_json(doc.at("fabric"), "scenario.fabric");
    }

    if (!doc.contains("workload") || !doc.at("workload").is_array())
        throw ConfigError("scenario.workload: must be an array");
    std::size_t i = 0;
    for (const auto& w : doc.at("workload")) {
        const std::string path = "scenario.workload[" + std::to_string(i++) + "]";
        detail::require_scenario_keys(
            w, {"benchmark", "count", "arrival_ns", "priority", "latency_cycles_override"},
            path);
        if (!w.contains("benchmark")) throw ConfigError(path + ".benchmark: missing");
        JobTemplate t;
        t.benchmark = w.at("benchmark").get<std::string>();
        if (w.contains("count"))
            t.count = static_cast<std::uint32_t>(detail::get_i64(w, "count", path));
        if (w.contains("arrival_ns")) {
            t.arrival_ns = detail::get_i64(w, "arrival_ns", path);
            if (t.arrival_ns < 0) throw ConfigError(path + ".arrival_ns: must be >= 0");
        }
        if (w.contains("priority"))
            t.priority = static_cast<int>(detail::get_i64(w, "priority", path));
        if (w.contains("latency_cycles_override")) {
            const auto v = detail::get_i64(w, "latency_cycles_override", path);
            if (v <= 0) throw ConfigError(path + ".latency_cycles_override: must be > 0");
            t.latency_cycles_override = static_cast<std::uint64_t>(v);
        }
        sc.workload.push_back(std::move(t));
    }

    if (!doc.contains("policy")) throw ConfigError("scenario.policy: missing");
    {
        const auto& p = doc.at("policy");
        detail::require_scenario_keys(p, {"kind", "quantum_ns"}, "scenario.policy");
        if (!p.contains("kind")) throw ConfigError("scenario.policy.kind: missing");
        const auto kind = p.at("kind").get<std::string>();
        bool matched = false;
        for (auto k : {PolicyKind::RoundRobinPreemptive, PolicyKind::RoundRobinEvictRestart,
                       PolicyKind::RunToCompletion, PolicyKind::PriorityPreemptive}) {
            if (kind == to_string(k)) {
                sc.policy.kind = k;
                matched = true;
            }
        }
        if (!matched) throw ConfigError("scenario.policy.kind: unknown policy '" + kind + "'");
        if (p.contains("quantum_ns"))
            sc.policy.quantum_ns = detail::get_i64(p, "quantum_ns", "scenario.policy");
        sc.policy.validate();
    }

    if (doc.contains("frame_model"))
        sc.frame_model = detail::parse_frame_model_json(doc.at("frame_model"),
                                                        "scenario.frame_model");

    if (!doc.contains("frame_policy")) throw ConfigError("scenario.frame_policy: missing");
    {
        const auto& fp = doc.at("frame_policy");
        detail::require_scenario_keys(fp, {"kind", "frames"}, "scenario.frame_policy");
        if (!fp.contains("kind")) throw ConfigError("scenario.frame_policy.kind: missing");
        const auto kind = fp.at("kind").get<std::string>();
        if (kind == "single-frame") {
            sc.frame_policy = FrameCountPolicy::single_frame();
        } else if (kind == "resource-estimate") {
            sc.frame_policy = FrameCountPolicy::resource_estimate(sc.frame_model);
        } else if (kind == "fixed") {
            if (!fp.contains("frames"))
                throw ConfigError("scenario.frame_policy.frames: required for fixed");
            const auto n = detail::get_i64(fp, "frames", "scenario.frame_policy");
            if (n < 1) throw ConfigError("scenario.frame_policy.frames: must be >= 1");
            sc.frame_policy = FrameCountPolicy::fixed(static_cast<std::uint64_t>(n));
        } else {
            throw ConfigError("scenario.frame_policy.kind: unknown kind '" + kind + "'");
        }
    }

    if (doc.contains("cost_model")) {
        const auto& cm = doc.at("cost_model");
        detail::require_scenario_keys(
            cm, {"save_ns_per_frame", "restore_ns_per_frame", "reset_ns", "reconfig_load_ns"},
            "scenario.cost_model");
        auto set = [&](const char* key, std::int64_t& field) {
            if (cm.contains(key)) field = detail::get_i64(cm, key, "scenario.cost_model");
        };
        set("save_ns_per_frame", sc.cost_model.save_ns_per_frame);
        set("restore_ns_per_frame", sc.cost_model.restore_ns_per_frame);
        set("reset_ns", sc.cost_model.reset_ns);
        set("reconfig_load_ns", sc.cost_model.reconfig_load_ns);
        try {
            sc.cost_model.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("scenario.cost_model: ") + e.what());
        }
    }

    if (!doc.contains("seed")) throw ConfigError("scenario.seed: missing");
    if (!doc.at("seed").is_number_integer())
        throw ConfigError("scenario.seed: must be an integer");
    sc.seed = doc.at("seed").get<std::uint64_t>();

    if (doc.contains("horizon_ns")) {
        const auto h = detail::get_i64(doc, "horizon_ns", "scenario");
        if (h <= 0) throw ConfigError("scenario.horizon_ns: must be > 0");
        sc.horizon_ns = h;
    }
    return sc;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ScenarioConfig load_scenario_file(const std::string& path) {
    return parse_scenario(read_text_file(path));
}

}  // namespace fpsim
