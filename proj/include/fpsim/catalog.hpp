#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpsim/errors.hpp"
#include "fpsim/fabric.hpp"
#include "fpsim/resources.hpp"

namespace fpsim {

enum class BenchmarkKind { PLAccelerator, RiscvSoftcore };

enum class DomainClass {
    VideoProcessing,
    Communication,
    Cryptography,
    SignalProcessing,
    Computational,
    MachineLearning,
    DatabaseOps,
    PatternRecognition,
    PerformanceBenchmark,
};

/// Where a latency figure comes from. Only two catalog entries have cycle
/// counts published as measurements; the rest must be supplied by the user.
enum class LatencyProvenance { Measured, UserSupplied };

struct BenchmarkSpec {
    std::string name;   // stable kebab-case identifier, the catalog key
    std::string label;  // display name as printed in the source tables
    BenchmarkKind kind = BenchmarkKind::PLAccelerator;
    DomainClass domain_class = DomainClass::Computational;
    ResourceVector resources;
    std::optional<std::uint64_t> latency_cycles;
    double clock_mhz = 100.0;
    std::optional<std::uint32_t> code_size_kb;  // RISC-V softcores only
    LatencyProvenance latency_provenance = LatencyProvenance::UserSupplied;

    friend bool operator==(const BenchmarkSpec&, const BenchmarkSpec&) = default;
};

inline const char* to_string(BenchmarkKind k) {
    return k == BenchmarkKind::PLAccelerator ? "pl-accelerator" : "riscv-softcore";
}

inline const char* to_string(DomainClass c) {
    switch (c) {
        case DomainClass::VideoProcessing: return "video-processing";
        case DomainClass::Communication: return "communication";
        case DomainClass::Cryptography: return "cryptography";
        case DomainClass::SignalProcessing: return "signal-processing";
        case DomainClass::Computational: return "computational";
        case DomainClass::MachineLearning: return "machine-learning";
        case DomainClass::DatabaseOps: return "database-ops";
        case DomainClass::PatternRecognition: return "pattern-recognition";
        case DomainClass::PerformanceBenchmark: return "performance-benchmark";
    }
    return "?";
}

/// Normalizes a display name to its stable identifier: lowercase, periods
/// elided, any other non-alphanumeric run collapses to a single dash.
/// "ML-KEM Server" -> "ml-kem-server", "H.264 Encoder" -> "h264-encoder".
inline std::string normalize_name(const std::string& label) {
    std::string out;
    bool pending_dash = false;
    for (char ch : label) {
        const auto c = static_cast<unsigned char>(ch);
        if (c == '.') continue;
        if (std::isalnum(c)) {
            if (pending_dash && !out.empty()) out.push_back('-');
            pending_dash = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending_dash = true;
        }
    }
    return out;
}

namespace detail {

inline BenchmarkSpec pl_entry(const char* label, DomainClass cls, ResourceVector res,
                              std::optional<std::uint64_t> measured_latency = std::nullopt) {
    BenchmarkSpec s;
    s.label = label;
    s.name = normalize_name(s.label);
    s.kind = BenchmarkKind::PLAccelerator;
    s.domain_class = cls;
    s.resources = res;
    s.latency_cycles = measured_latency;
    if (measured_latency) s.latency_provenance = LatencyProvenance::Measured;
    return s;
}

inline BenchmarkSpec riscv_entry(const char* label, DomainClass cls, ResourceVector res,
                                 std::uint32_t code_kb) {
    BenchmarkSpec s;
    s.label = label;
    s.name = normalize_name(s.label);
    s.kind = BenchmarkKind::RiscvSoftcore;
    s.domain_class = cls;
    s.resources = res;
    s.code_size_kb = code_kb;
    return s;
}

}  // namespace detail

/// The bundled 27-entry dataset: 15 PL accelerators and 12 RISC-V softcore
/// benchmarks, resource vectors transcribed from the measured utilization
/// tables. Only ML-KEM Server and H.264 Encoder carry cycle counts; the other
/// latencies were published as unreadable chart annotations and stay unset
/// until a scenario supplies them.
inline const std::vector<BenchmarkSpec>& builtin_catalog() {
    using D = DomainClass;
    static const std::vector<BenchmarkSpec> entries = {
        // PL-based accelerators
        detail::pl_entry("PNG Decoder", D::VideoProcessing, {2737, 597, 22, 0}),
        detail::pl_entry("JPEG Decoder", D::VideoProcessing, {2334, 469, 5, 0}),
        detail::pl_entry("H.264 Encoder", D::VideoProcessing, {3034, 1095, 2, 2}, 171029),
        detail::pl_entry("Viterbi Decoder", D::Communication, {39, 11, 0, 0}),
        detail::pl_entry("OpenNoC", D::Communication, {4980, 4017, 0, 0}),
        detail::pl_entry("ML-KEM Server", D::Cryptography, {7016, 2985, 3, 2}, 34806),
        detail::pl_entry("ML-KEM Client", D::Cryptography, {7283, 3002, 3, 2}),
        detail::pl_entry("FFT", D::SignalProcessing, {2508, 6096, 3, 32}),
        detail::pl_entry("IIR Filter", D::SignalProcessing, {74, 36, 0, 0}),
        detail::pl_entry("FIR Filter", D::SignalProcessing, {88, 41, 0, 0}),
        detail::pl_entry("MIPS Processor", D::Computational, {916, 197, 8, 0}),
        detail::pl_entry("Trigonometry", D::Computational, {1242, 435, 0, 0}),
        detail::pl_entry("Image Processor", D::MachineLearning, {84, 8, 0, 0}),
        detail::pl_entry("Neural Network Convolution Layer", D::MachineLearning,
                         {2082, 730, 0, 0}),
        detail::pl_entry("Matrix Multiplication", D::MachineLearning, {557, 141, 108, 2}),
        // RISC-V softcore benchmarks
        detail::riscv_entry("AES-128", D::Cryptography, {3978, 2353, 32, 3}, 81),
        detail::riscv_entry("SHA-256", D::Cryptography, {4070, 2323, 32, 3}, 77),
        detail::riscv_entry("FALCON Key Generate", D::Cryptography, {4070, 2356, 32, 3}, 38),
        detail::riscv_entry("FALCON Sign. Generate", D::Cryptography, {4070, 2356, 32, 3}, 63),
        detail::riscv_entry("FALCON Sign. Verify", D::Cryptography, {4070, 2356, 32, 3}, 35),
        detail::riscv_entry("GEMM", D::MachineLearning, {4056, 696, 32, 3}, 135),
        detail::riscv_entry("BFS", D::DatabaseOps, {4059, 700, 32, 3}, 103),
        detail::riscv_entry("Sort", D::DatabaseOps, {4053, 680, 32, 3}, 115),
        detail::riscv_entry("NW", D::PatternRecognition, {4057, 685, 32, 3}, 116),
        detail::riscv_entry("KMP", D::PatternRecognition, {4053, 695, 32, 3}, 8),
        detail::riscv_entry("Dhrystone", D::PerformanceBenchmark, {4055, 686, 32, 3}, 73),
        detail::riscv_entry("RISC-V Coremark", D::PerformanceBenchmark, {4052, 694, 32, 3}, 93),
    };
    return entries;
}

inline const BenchmarkSpec* find_benchmark(const std::vector<BenchmarkSpec>& catalog,
                                           const std::string& name) {
    for (const auto& b : catalog)
        if (b.name == name) return &b;
    return nullptr;
}

struct CatalogWarning {
    enum class Kind { NoFittingSlot };
    Kind kind;
    std::string message;
};

/// Flags a spec whose footprint exceeds every slot of a fabric componentwise.
/// The bundled Matrix Multiplication entry (108 BRAMs vs. an 80-BRAM maximum
/// slot) trips this against every builtin fabric; the data is kept as
/// transcribed rather than edited.
inline std::vector<CatalogWarning> validate_spec(const BenchmarkSpec& spec,
                                                 const FabricConfig& fabric) {
    std::vector<CatalogWarning> warnings;
    const bool any_fit = std::any_of(
        fabric.slots.begin(), fabric.slots.end(),
        [&](const Slot& s) { return fits(spec.resources, s.capacity); });
    if (!any_fit) {
        warnings.push_back({CatalogWarning::Kind::NoFittingSlot,
                            "'" + spec.name + "' " + to_string(spec.resources) +
                                " fits no slot of fabric '" + fabric.name + "'"});
    }
    return warnings;
}

// --- catalog document (JSON array of entries, order-insensitive keys) ------

namespace detail {

using nlohmann::json;

inline void require_known_keys(const json& obj, std::initializer_list<const char*> allowed,
                               const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return it.key() == k;
            }) == allowed.end()) {
            throw ValidationError(path + "." + it.key(), "unknown field");
        }
    }
}

inline std::uint64_t get_count(const json& obj, const char* key, const std::string& path) {
    const auto& v = obj.at(key);
    const bool ok =
        v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    if (!ok) throw ValidationError(path + "." + key, "must be a non-negative integer");
    return v.get<std::uint64_t>();
}

inline ResourceVector parse_resources(const json& obj, const std::string& path) {
    if (!obj.is_object()) throw ValidationError(path, "must be an object");
    require_known_keys(obj, {"luts", "ffs", "brams", "dsps"}, path);
    for (const char* k : {"luts", "ffs", "brams", "dsps"})
        if (!obj.contains(k)) throw ValidationError(path + "." + k, "missing");
    return ResourceVector{get_count(obj, "luts", path), get_count(obj, "ffs", path),
                          get_count(obj, "brams", path), get_count(obj, "dsps", path)};
}

inline json render_resources(const ResourceVector& r) {
    return json{{"luts", r.luts}, {"ffs", r.ffs}, {"brams", r.brams}, {"dsps", r.dsps}};
}

inline BenchmarkKind parse_kind(const json& v, const std::string& path) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "pl-accelerator") return BenchmarkKind::PLAccelerator;
        if (s == "riscv-softcore") return BenchmarkKind::RiscvSoftcore;
    }
    throw ValidationError(path, "expected \"pl-accelerator\" or \"riscv-softcore\"");
}

inline DomainClass parse_domain_class(const json& v, const std::string& path) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        for (auto c : {DomainClass::VideoProcessing, DomainClass::Communication,
                       DomainClass::Cryptography, DomainClass::SignalProcessing,
                       DomainClass::Computational, DomainClass::MachineLearning,
                       DomainClass::DatabaseOps, DomainClass::PatternRecognition,
                       DomainClass::PerformanceBenchmark}) {
            if (s == to_string(c)) return c;
        }
    }
    throw ValidationError(path, "unknown domain class");
}

inline bool is_kebab_identifier(const std::string& s) {
    if (s.empty() || s.front() == '-' || s.back() == '-') return false;
    for (char c : s)
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '-'))
            return false;
    return true;
}

}  // namespace detail

/// Checks the cross-field invariants of one entry; throws ValidationError
/// naming the offending field.
inline void validate_benchmark_spec(const BenchmarkSpec& s, const std::string& path = "entry") {
    if (!detail::is_kebab_identifier(s.name))
        throw ValidationError(path + ".name", "must be a kebab-case identifier");
    if (s.latency_cycles && *s.latency_cycles == 0)
        throw ValidationError(path + ".latency_cycles", "must be positive");
    if (!(s.clock_mhz >= 50.0 && s.clock_mhz <= 100.0))
        throw ValidationError(path + ".clock_mhz", "must be in [50, 100]");
    if (s.kind == BenchmarkKind::RiscvSoftcore && !s.code_size_kb)
        throw ValidationError(path + ".code_size_kb", "required for riscv-softcore entries");
    if (s.kind == BenchmarkKind::PLAccelerator && s.code_size_kb)
        throw ValidationError(path + ".code_size_kb", "not allowed for pl-accelerator entries");
    if (s.code_size_kb && *s.code_size_kb == 0)
        throw ValidationError(path + ".code_size_kb", "must be positive");
}

/// Parses a catalog document. Unknown fields are rejected; every entry passes
/// validate_benchmark_spec; duplicate names are an error. Latency provenance
/// is derived, not serialized: entries matching the two published measured
/// figures load as Measured, everything else as UserSupplied.
inline std::vector<BenchmarkSpec> parse_catalog(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("catalog: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError("catalog: top level must be an array");

    std::vector<BenchmarkSpec> out;
    out.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string path = "[" + std::to_string(i) + "]";
        const auto& e = doc[i];
        if (!e.is_object()) throw ValidationError(path, "must be an object");
        detail::require_known_keys(e,
                                   {"name", "label", "kind", "domain_class", "resources",
                                    "latency_cycles", "clock_mhz", "code_size_kb"},
                                   path);
        for (const char* k : {"name", "kind", "domain_class", "resources"})
            if (!e.contains(k)) throw ValidationError(path + "." + k, "missing");

        BenchmarkSpec s;
        if (!e.at("name").is_string()) throw ValidationError(path + ".name", "must be a string");
        s.name = e.at("name").get<std::string>();
        s.label = e.contains("label") ? e.at("label").get<std::string>() : s.name;
        s.kind = detail::parse_kind(e.at("kind"), path + ".kind");
        s.domain_class = detail::parse_domain_class(e.at("domain_class"), path + ".domain_class");
        s.resources = detail::parse_resources(e.at("resources"), path + ".resources");
        if (e.contains("latency_cycles"))
            s.latency_cycles = detail::get_count(e, "latency_cycles", path);
        if (e.contains("clock_mhz")) {
            if (!e.at("clock_mhz").is_number())
                throw ValidationError(path + ".clock_mhz", "must be a number");
            s.clock_mhz = e.at("clock_mhz").get<double>();
        }
        if (e.contains("code_size_kb"))
            s.code_size_kb = static_cast<std::uint32_t>(detail::get_count(e, "code_size_kb", path));
        validate_benchmark_spec(s, path);

        const bool measured = (s.name == "ml-kem-server" && s.latency_cycles == 34806u) ||
                           (s.name == "h264-encoder" && s.latency_cycles == 171029u);
        s.latency_provenance =
            measured ? LatencyProvenance::Measured : LatencyProvenance::UserSupplied;

        if (find_benchmark(out, s.name))
            throw ValidationError(path + ".name", "duplicate name '" + s.name + "'");
        out.push_back(std::move(s));
    }
    return out;
}

/// Renders a catalog back to its document form. parse_catalog(render_catalog(c)) == c.
inline std::string render_catalog(const std::vector<BenchmarkSpec>& catalog) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& s : catalog) {
        nlohmann::json e{{"name", s.name},
                         {"label", s.label},
                         {"kind", to_string(s.kind)},
                         {"domain_class", to_string(s.domain_class)},
                         {"resources", detail::render_resources(s.resources)},
                         {"clock_mhz", s.clock_mhz}};
        if (s.latency_cycles) e["latency_cycles"] = *s.latency_cycles;
        if (s.code_size_kb) e["code_size_kb"] = *s.code_size_kb;
        doc.push_back(std::move(e));
    }
    return doc.dump(2) + "\n";
}

}  // namespace fpsim
