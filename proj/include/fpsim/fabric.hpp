#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpsim/errors.hpp"
#include "fpsim/resources.hpp"

namespace fpsim {

/// One exclusive reconfigurable partition of the PL fabric. The region label
/// is cosmetic free text (clock-region names); it plays no role in placement.
struct Slot {
    int id = 1;
    ResourceVector capacity;
    std::string region_label;

    friend bool operator==(const Slot&, const Slot&) = default;
};

struct FabricConfig {
    std::string name;
    std::vector<Slot> slots;

    const Slot* find_slot(int id) const {
        for (const auto& s : slots)
            if (s.id == id) return &s;
        return nullptr;
    }

    void validate() const {
        if (slots.empty()) throw ValidationError("slots", "fabric must have at least one slot");
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (slots[i].id < 1)
                throw ValidationError("slots[" + std::to_string(i) + "].id", "must be >= 1");
            for (std::size_t j = i + 1; j < slots.size(); ++j) {
                if (slots[i].id == slots[j].id)
                    throw ValidationError("slots[" + std::to_string(j) + "].id",
                                          "duplicate slot id " + std::to_string(slots[j].id));
            }
        }
    }

    friend bool operator==(const FabricConfig&, const FabricConfig&) = default;
};

/// Which job, if any, currently holds each slot. Owned by a single run.
struct Occupancy {
    std::map<int, std::optional<std::uint32_t>> slots;

    static Occupancy all_free(const FabricConfig& fabric) {
        Occupancy occ;
        for (const auto& s : fabric.slots) occ.slots.emplace(s.id, std::nullopt);
        return occ;
    }

    bool is_free(int slot_id) const {
        auto it = slots.find(slot_id);
        return it != slots.end() && !it->second.has_value();
    }
};

/// The three slot partitions measured on the XC7Z020.
inline std::vector<FabricConfig> builtin_fabrics() {
    return {
        FabricConfig{"1-slot", {Slot{1, {11200, 22400, 80, 60}, "X0Y0+X1Y0"}}},
        FabricConfig{"2-slot",
                     {Slot{1, {11200, 22400, 80, 60}, "X0Y1"},
                      Slot{2, {200, 400, 0, 0}, "X1Y1"}}},
        FabricConfig{"3-slot",
                     {Slot{1, {800, 1600, 10, 10}, ""},
                      Slot{2, {1600, 3200, 20, 20}, ""},
                      Slot{3, {10000, 20000, 80, 60}, ""}}},
    };
}

inline const FabricConfig& builtin_fabric(const std::string& name) {
    static const std::vector<FabricConfig> fabrics = builtin_fabrics();
    for (const auto& f : fabrics)
        if (f.name == name) return f;
    throw NotFoundError("unknown builtin fabric '" + name + "'");
}

/// Smallest unoccupied slot whose capacity covers the demand. "Smallest" is
/// lexicographic on capacity (luts, ffs, brams, dsps), ties broken by lowest
/// id, so the result does not depend on slot order in the config.
inline std::optional<int> smallest_fit(const ResourceVector& demand,
                                       const FabricConfig& fabric,
                                       const Occupancy& occupancy) {
    const Slot* best = nullptr;
    for (const auto& s : fabric.slots) {
        if (!occupancy.is_free(s.id) || !fits(demand, s.capacity)) continue;
        if (!best || s.capacity < best->capacity ||
            (s.capacity == best->capacity && s.id < best->id)) {
            best = &s;
        }
    }
    if (!best) return std::nullopt;
    return best->id;
}

}  // namespace fpsim
