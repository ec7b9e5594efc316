#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>

#include "masim/ids.hpp"

namespace masim {

enum class CapabilityKind {
    spawn,
    delegate,
    access_memory,
    communicate,
    user_interact,
    kill,
};

const char* capability_kind_name(CapabilityKind kind) noexcept;
std::optional<CapabilityKind> parse_capability_kind(std::string_view text);

// kill may carry an explicit target agent (a per-agent policy override); all
// other kinds never carry a parameter. The default kill authority toward an
// agent's own children is implicit via the edge set and is never materialized
// as an entry here.
struct Capability {
    CapabilityKind kind = CapabilityKind::spawn;
    std::optional<AgentId> kill_target;

    auto operator<=>(const Capability&) const = default;
};

// Formats as the capability name, with "kill:<id>" for targeted kill entries.
std::string capability_text(const Capability& cap);

class CapabilitySet {
public:
    void add(Capability cap);
    void add(CapabilityKind kind) { add(Capability{kind, std::nullopt}); }

    // Generic (untargeted) entry of the given kind.
    bool has(CapabilityKind kind) const;
    // Explicit kill(target) policy override.
    bool has_kill_override(AgentId target) const;

    // Subset check over non-parameterized entries only; explicit kill targets
    // are compared separately at spawn because they depend on the edge set.
    bool generic_subset_of(const CapabilitySet& other) const;

    const std::set<Capability>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    bool operator==(const CapabilitySet&) const = default;

private:
    std::set<Capability> entries_;
};

}  // namespace masim
