#pragma once

// Agent capability registry: registration-time policy store plus the pure
// policy decision function mediating tool invocations and structural
// operations.
//
// Invariants:
//   - Entries are immutable after registration; there is no mutation surface.
//   - decide() is a pure function of (entry, action, edge set): same inputs,
//     same decision, no side effects.
//   - Unregistered agents are denied everything (fail-closed).

#include <map>
#include <optional>
#include <set>
#include <string>

#include "masim/capability.hpp"
#include "masim/ids.hpp"
#include "masim/network.hpp"

namespace masim {

using ToolId = std::string;

// Scenario-declared role -> authorized tool set.
class RoleResourceMap {
public:
    void declare(const std::string& role, std::set<ToolId> tools);
    const std::set<ToolId>* find(const std::string& role) const;
    // Throws unknown_role.
    const std::set<ToolId>& require(const std::string& role) const;
    const std::map<std::string, std::set<ToolId>>& entries() const {
        return entries_;
    }

private:
    std::map<std::string, std::set<ToolId>> entries_;
};

struct RegistryEntry {
    AgentId agent;
    CapabilitySet capabilities;   // structural operations
    std::set<ToolId> resources;   // tool surface, derived from the role
    std::string role;
    LogicalTime registered_at = 0;
};

std::uint64_t entry_digest(const RegistryEntry& entry);

enum class Verdict { permit, deny };

// A tool invocation or a structural operation, as presented to decide().
struct ActionRef {
    enum class Kind { tool, structural };

    Kind kind = Kind::tool;
    ToolId tool;
    Capability capability;

    static ActionRef for_tool(ToolId id) {
        ActionRef a;
        a.kind = Kind::tool;
        a.tool = std::move(id);
        return a;
    }
    static ActionRef structural(Capability cap) {
        ActionRef a;
        a.kind = Kind::structural;
        a.capability = cap;
        return a;
    }
};

namespace reason {
inline constexpr const char* unregistered = "unregistered";
inline constexpr const char* tool_not_in_role = "tool-not-in-role";
inline constexpr const char* capability_missing = "capability-missing";
inline constexpr const char* kill_not_parent = "kill-not-parent";
inline constexpr const char* kill_sibling_needs_parent =
    "kill-sibling-needs-parent-approval";
}  // namespace reason

struct PolicyDecision {
    Verdict verdict = Verdict::deny;
    std::string reason;  // machine-readable code; empty on permit
    std::string detail;

    bool permitted() const { return verdict == Verdict::permit; }
};

class CapabilityRegistry {
public:
    // Throws already_registered / unknown_role. The entry is immutable from
    // this point on.
    const RegistryEntry& register_agent(AgentId agent,
                                        const CapabilitySet& capabilities,
                                        const std::string& role,
                                        const RoleResourceMap& map,
                                        LogicalTime now);

    bool registered(AgentId agent) const;
    const RegistryEntry* entry(AgentId agent) const;
    const std::map<AgentId, RegistryEntry>& entries() const { return entries_; }

    // Tool actions check the registered resource set; structural actions check
    // the capability set. kill(target) additionally requires the actor to be
    // the target's parent or the root; a sibling request denies with a reason
    // code that the enforcement point maps to suspension.
    PolicyDecision decide(AgentId agent, const ActionRef& action,
                          const NetworkState& state) const;

private:
    std::map<AgentId, RegistryEntry> entries_;
};

}  // namespace masim
