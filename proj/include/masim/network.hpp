#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "masim/capability.hpp"
#include "masim/ids.hpp"
#include "masim/memory.hpp"
#include "masim/sensitivity.hpp"

namespace masim {

enum class Lifespan { one_time, persistent };
enum class Interaction { session_based, task_oriented };

const char* lifespan_name(Lifespan value) noexcept;
std::optional<Lifespan> parse_lifespan(std::string_view text);
const char* interaction_name(Interaction value) noexcept;
std::optional<Interaction> parse_interaction(std::string_view text);

struct Role {
    std::string name;
    SensitivityLabel clearance;

    bool operator==(const Role&) const = default;
};

// One observed read, kept per (reader, segment) for divergence analysis.
// Re-reading the same segment replaces the entry.
struct CachedRead {
    SegmentId seg;
    std::string name;
    std::string content;
    LogicalTime at = 0;
    bool from_workspace = false;
};

struct AgentRecord {
    AgentId id;
    std::string name;
    Role role;
    CapabilitySet capabilities;
    MemoryStore memory;
    Lifespan lifespan = Lifespan::one_time;
    Interaction interaction = Interaction::task_oriented;
    bool alive = true;

    // Spawn provenance, kept for post-hoc invariant checking.
    std::optional<AgentId> parent;
    MemoryMode declared_mode = MemoryMode::agent_agnostic;
    std::optional<std::vector<SegmentId>> declared_selector;
    LogicalTime spawned_at = 0;

    std::vector<CachedRead> reads;

    const CachedRead* last_read(SegmentId seg) const;
    const CachedRead* last_read_named(std::string_view name) const;
    void record_read(CachedRead read);
};

struct SpawnSpec {
    std::string name;
    Role role;
    CapabilitySet capabilities;
    MemoryMode memory_mode = MemoryMode::agent_agnostic;
    std::optional<std::vector<SegmentId>> selector;
    Lifespan lifespan = Lifespan::one_time;
    Interaction interaction = Interaction::task_oriented;
};

struct ValidationIssue {
    std::string kind;  // "duplicate-parent" | "cycle" | "unreachable" | "missing-root"
    std::optional<AgentId> node;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

// The agent hierarchy: agent records, parent-child edges, the root, and the
// logical clock. Pure structure; policy lives in the kernel and the registry.
// Terminated agents are tombstoned (alive = false), never removed, so edges
// and capability sets stay stable for post-hoc analysis.
class NetworkState {
public:
    AgentId root() const { return root_; }
    void set_root(AgentId id) { root_ = id; }

    LogicalTime clock() const { return clock_; }
    LogicalTime advance_clock() { return ++clock_; }
    void set_clock(LogicalTime t) { clock_ = t; }

    bool exists(AgentId id) const;
    const AgentRecord& agent(AgentId id) const;  // throws unknown_agent
    AgentRecord& agent(AgentId id);              // throws unknown_agent
    const std::map<AgentId, AgentRecord>& agents() const { return agents_; }

    const std::set<std::pair<AgentId, AgentId>>& edges() const { return edges_; }
    bool has_edge(AgentId parent, AgentId child) const;
    std::optional<AgentId> parent_of(AgentId child) const;
    bool siblings(AgentId a, AgentId b) const;
    std::vector<AgentId> children_of(AgentId parent) const;

    // All agents strictly below `a` (a itself excluded). Throws unknown_agent.
    std::set<AgentId> descendants(AgentId a) const;

    // Passes iff every non-root agent has exactly one parent, the graph is
    // acyclic, and every agent is reachable from the root.
    ValidationReport validate_arborescence() const;

    // Strictly increasing id allocation; ids are never reissued.
    AgentId allocate_id() { return AgentId{next_id_++}; }
    std::uint32_t next_id() const { return next_id_; }
    void set_next_id(std::uint32_t v) { next_id_ = v; }

    // Raw mutators with no policy checks: used by the kernel after its checks
    // pass, by trace replay, and by validation tooling that must be able to
    // represent malformed graphs.
    AgentRecord& add_agent_raw(AgentRecord record);
    void add_edge_raw(AgentId parent, AgentId child);

private:
    std::map<AgentId, AgentRecord> agents_;
    std::set<std::pair<AgentId, AgentId>> edges_;
    AgentId root_{0};
    std::uint32_t next_id_ = 0;
    LogicalTime clock_ = 0;
};

}  // namespace masim
