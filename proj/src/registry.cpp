#include "masim/registry.hpp"

#include "masim/errors.hpp"
#include "masim/hash.hpp"

namespace masim {

void RoleResourceMap::declare(const std::string& role, std::set<ToolId> tools) {
    entries_[role] = std::move(tools);
}

const std::set<ToolId>* RoleResourceMap::find(const std::string& role) const {
    auto it = entries_.find(role);
    return it == entries_.end() ? nullptr : &it->second;
}

const std::set<ToolId>& RoleResourceMap::require(const std::string& role) const {
    if (const auto* tools = find(role)) {
        return *tools;
    }
    fail(Errc::unknown_role, "role '" + role + "' has no resource mapping");
}

std::uint64_t entry_digest(const RegistryEntry& entry) {
    std::uint64_t h = fnv1a64(std::to_string(entry.agent.value));
    h = fnv1a64("|" + entry.role, h);
    h = fnv1a64("|" + std::to_string(entry.registered_at), h);
    for (const auto& cap : entry.capabilities.entries()) {
        h = fnv1a64("|c:" + capability_text(cap), h);
    }
    for (const auto& tool : entry.resources) {
        h = fnv1a64("|r:" + tool, h);
    }
    return h;
}

const RegistryEntry& CapabilityRegistry::register_agent(
    AgentId agent, const CapabilitySet& capabilities, const std::string& role,
    const RoleResourceMap& map, LogicalTime now) {
    if (entries_.contains(agent)) {
        fail(Errc::already_registered,
             "agent " + std::to_string(agent.value) + " already registered");
    }
    RegistryEntry entry;
    entry.agent = agent;
    entry.capabilities = capabilities;
    entry.resources = map.require(role);
    entry.role = role;
    entry.registered_at = now;
    auto [it, inserted] = entries_.emplace(agent, std::move(entry));
    (void)inserted;
    return it->second;
}

bool CapabilityRegistry::registered(AgentId agent) const {
    return entries_.contains(agent);
}

const RegistryEntry* CapabilityRegistry::entry(AgentId agent) const {
    auto it = entries_.find(agent);
    return it == entries_.end() ? nullptr : &it->second;
}

PolicyDecision CapabilityRegistry::decide(AgentId agent,
                                          const ActionRef& action,
                                          const NetworkState& state) const {
    const RegistryEntry* e = entry(agent);
    if (e == nullptr) {
        return {Verdict::deny, reason::unregistered,
                "agent " + std::to_string(agent.value) + " is not registered"};
    }

    if (action.kind == ActionRef::Kind::tool) {
        if (e->resources.contains(action.tool)) {
            return {Verdict::permit, "", ""};
        }
        return {Verdict::deny, reason::tool_not_in_role,
                "tool '" + action.tool + "' not in resources of role '" +
                    e->role + "'"};
    }

    const Capability& cap = action.capability;
    if (cap.kind != CapabilityKind::kill) {
        if (e->capabilities.has(cap.kind)) {
            return {Verdict::permit, "", ""};
        }
        return {Verdict::deny, reason::capability_missing,
                std::string("capability '") + capability_kind_name(cap.kind) +
                    "' not held"};
    }

    // kill: the edge set is consulted only here. Explicit overrides are rare
    // per-agent policy grants; the default authority is parent-or-root.
    if (!cap.kill_target) {
        return {Verdict::deny, reason::capability_missing,
                "kill requires a target"};
    }
    const AgentId target = *cap.kill_target;
    if (e->capabilities.has_kill_override(target)) {
        return {Verdict::permit, "", ""};
    }
    const bool structural_authority =
        state.has_edge(agent, target) || agent == state.root();
    if (e->capabilities.has(CapabilityKind::kill) && structural_authority) {
        return {Verdict::permit, "", ""};
    }
    if (state.siblings(agent, target)) {
        return {Verdict::deny, reason::kill_sibling_needs_parent,
                "sibling termination requires shared-parent approval"};
    }
    if (!e->capabilities.has(CapabilityKind::kill)) {
        return {Verdict::deny, reason::capability_missing,
                "capability 'kill' not held"};
    }
    return {Verdict::deny, reason::kill_not_parent,
            "actor is neither the target's parent nor the root"};
}

}  // namespace masim
