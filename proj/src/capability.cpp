#include "masim/capability.hpp"

namespace masim {

const char* capability_kind_name(CapabilityKind kind) noexcept {
    switch (kind) {
        case CapabilityKind::spawn: return "spawn";
        case CapabilityKind::delegate: return "delegate";
        case CapabilityKind::access_memory: return "access-memory";
        case CapabilityKind::communicate: return "communicate";
        case CapabilityKind::user_interact: return "user-interact";
        case CapabilityKind::kill: return "kill";
    }
    return "unknown";
}

std::optional<CapabilityKind> parse_capability_kind(std::string_view text) {
    if (text == "spawn") return CapabilityKind::spawn;
    if (text == "delegate") return CapabilityKind::delegate;
    if (text == "access-memory") return CapabilityKind::access_memory;
    if (text == "communicate") return CapabilityKind::communicate;
    if (text == "user-interact") return CapabilityKind::user_interact;
    if (text == "kill") return CapabilityKind::kill;
    return std::nullopt;
}

std::string capability_text(const Capability& cap) {
    std::string out = capability_kind_name(cap.kind);
    if (cap.kind == CapabilityKind::kill && cap.kill_target) {
        out += ":" + std::to_string(cap.kill_target->value);
    }
    return out;
}

void CapabilitySet::add(Capability cap) {
    if (cap.kind != CapabilityKind::kill) {
        cap.kill_target.reset();
    }
    entries_.insert(cap);
}

bool CapabilitySet::has(CapabilityKind kind) const {
    return entries_.contains(Capability{kind, std::nullopt});
}

bool CapabilitySet::has_kill_override(AgentId target) const {
    return entries_.contains(Capability{CapabilityKind::kill, target});
}

bool CapabilitySet::generic_subset_of(const CapabilitySet& other) const {
    for (const auto& cap : entries_) {
        if (cap.kind == CapabilityKind::kill && cap.kill_target) {
            continue;  // edge-dependent; checked by the spawn path
        }
        if (!other.entries_.contains(cap)) {
            return false;
        }
    }
    return true;
}

}  // namespace masim
