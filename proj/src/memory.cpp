#include "masim/memory.hpp"

#include <algorithm>

#include "masim/errors.hpp"
#include "masim/hash.hpp"

namespace masim {

const char* memory_mode_name(MemoryMode mode) noexcept {
    switch (mode) {
        case MemoryMode::inherit_full: return "inherit-full";
        case MemoryMode::inherit_partial: return "inherit-partial";
        case MemoryMode::agent_agnostic: return "agent-agnostic";
    }
    return "unknown";
}

std::optional<MemoryMode> parse_memory_mode(std::string_view text) {
    if (text == "inherit-full") return MemoryMode::inherit_full;
    if (text == "inherit-partial") return MemoryMode::inherit_partial;
    if (text == "agent-agnostic") return MemoryMode::agent_agnostic;
    return std::nullopt;
}

const char* enforcement_mode_name(EnforcementMode mode) noexcept {
    switch (mode) {
        case EnforcementMode::permissive: return "permissive";
        case EnforcementMode::enforced: return "enforced";
    }
    return "unknown";
}

std::optional<EnforcementMode> parse_enforcement_mode(std::string_view text) {
    if (text == "permissive") return EnforcementMode::permissive;
    if (text == "enforced") return EnforcementMode::enforced;
    return std::nullopt;
}

std::uint64_t segment_digest(const MemorySegment& seg) {
    std::uint64_t h = kFnvOffsetBasis;
    h = fnv1a64(std::to_string(seg.id.value), h);
    h = fnv1a64("|", h);
    h = fnv1a64(std::to_string(seg.label.rank), h);
    h = fnv1a64("|", h);
    h = fnv1a64(seg.content, h);
    h = fnv1a64(seg.adversarial ? "|eps" : "|-", h);
    h = fnv1a64(seg.name ? "|n:" + *seg.name : "|n:", h);
    h = fnv1a64(seg.executable ? "|x" : "|-", h);
    if (seg.trigger) {
        h = fnv1a64("|t:" + seg.trigger->keyword + ":" + seg.trigger->tool +
                        ":" + seg.trigger->target,
                    h);
    }
    return h;
}

void MemoryStore::append(MemorySegment seg) {
    if (find(seg.id) != nullptr) {
        fail(Errc::unknown_segment,
             "duplicate segment id " + std::to_string(seg.id.value) +
                 " in one store");
    }
    segments_.push_back(std::move(seg));
}

const MemorySegment* MemoryStore::find(SegmentId id) const {
    for (const auto& seg : segments_) {
        if (seg.id == id) return &seg;
    }
    return nullptr;
}

MemorySegment* MemoryStore::find(SegmentId id) {
    for (auto& seg : segments_) {
        if (seg.id == id) return &seg;
    }
    return nullptr;
}

const MemorySegment* MemoryStore::find_named(std::string_view name) const {
    for (const auto& seg : segments_) {
        if (seg.name && *seg.name == name) return &seg;
    }
    return nullptr;
}

MemorySegment* MemoryStore::find_named(std::string_view name) {
    for (auto& seg : segments_) {
        if (seg.name && *seg.name == name) return &seg;
    }
    return nullptr;
}

std::uint64_t store_digest(const MemoryStore& store) {
    std::uint64_t h = kFnvOffsetBasis;
    for (const auto& seg : store.segments()) {
        h = fnv1a64(hex64(segment_digest(seg)), h);
        h = fnv1a64(";", h);
    }
    return h;
}

MemorySnapshot snapshot(const MemoryStore& store, LogicalTime now) {
    MemorySnapshot snap;
    snap.taken_at = now;
    snap.segments = store.segments();
    return snap;
}

std::uint64_t snapshot_digest(const MemorySnapshot& snap) {
    std::uint64_t h = fnv1a64(std::to_string(snap.taken_at));
    for (const auto& seg : snap.segments) {
        h = fnv1a64(hex64(segment_digest(seg)), h);
        h = fnv1a64(";", h);
    }
    return h;
}

MemoryStore project(const MemoryStore& store, SensitivityLabel clearance) {
    MemoryStore out(store.owner());
    for (const auto& seg : store.segments()) {
        if (dominates(clearance, seg.label)) {
            out.append(seg);
        }
    }
    return out;
}

MemoryStore inherit(const MemoryStore& parent, MemoryMode mode,
                    const std::optional<std::vector<SegmentId>>& selector,
                    EnforcementMode enforcement,
                    SensitivityLabel child_clearance,
                    std::optional<AgentId> new_owner) {
    MemoryStore out(new_owner);
    switch (mode) {
        case MemoryMode::inherit_full:
            for (const auto& seg : parent.segments()) {
                out.append(seg);
            }
            break;
        case MemoryMode::inherit_partial: {
            if (!selector) {
                fail(Errc::bad_selector,
                     "inherit-partial requires a selector");
            }
            for (SegmentId id : *selector) {
                if (parent.find(id) == nullptr) {
                    fail(Errc::bad_selector,
                         "selector references unknown segment " +
                             std::to_string(id.value));
                }
            }
            // Preserve parent ordering rather than selector ordering.
            for (const auto& seg : parent.segments()) {
                if (std::find(selector->begin(), selector->end(), seg.id) !=
                    selector->end()) {
                    out.append(seg);
                }
            }
            break;
        }
        case MemoryMode::agent_agnostic:
            break;
    }
    if (enforcement == EnforcementMode::enforced) {
        return project(out, child_clearance);
    }
    return out;
}

}  // namespace masim
