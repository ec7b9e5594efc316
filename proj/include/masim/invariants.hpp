#pragma once

// Post-hoc evaluation of the security invariants over a finished run: the
// checkers are read-only over (trace, state) and deterministic, so the same
// verdicts can be recomputed from a replayed trace.

#include <string>
#include <vector>

#include "json.hpp"
#include "masim/network.hpp"
#include "masim/registry.hpp"
#include "masim/revision_log.hpp"
#include "masim/trace.hpp"

namespace masim {

enum class ViolationKind {
    unauthorized_termination,
    improper_inheritance,
    no_access_control,
    memory_divergence,
};

const char* violation_kind_name(ViolationKind kind) noexcept;

struct Violation {
    ViolationKind kind;
    AgentId actor;
    LogicalTime at = 0;
    nlohmann::json detail = nlohmann::json::object();

    nlohmann::json to_json() const;
};

// Flags every executed termination whose actor neither held kill authority
// over the target (parent edge or root, or an explicit override) at the time
// it ran. Capability sets and edges are immutable once created, so the final
// state is an exact witness.
std::vector<Violation> check_termination_scope(const Trace& trace,
                                               const NetworkState& state);

// Flags every spawned child whose initial store exceeded the bound of its
// declared inheritance mode: the parent store for inherit-full, the declared
// selector for inherit-partial, nothing for agent-agnostic.
std::vector<Violation> check_memory_isolation(const Trace& trace,
                                              const NetworkState& state);

// Flags every executed tool invocation outside the invoking agent's
// role-to-resource mapping. The root orchestrator is out of scope.
std::vector<Violation> check_access_control(const Trace& trace,
                                            const NetworkState& state,
                                            const RoleResourceMap& role_map);

// Flags every executed commit (a write with declared source segments) whose
// source was stale or revoked at commit time relative to when the writer
// acquired it.
std::vector<Violation> check_divergence(const Trace& trace,
                                        const NetworkState& state,
                                        const MemoryStore& workspace,
                                        const RevisionLog& log);

// Diagnostic (non-violation) report of every cached read that no longer
// matches the current segment content in the workspace or the parent store.
std::vector<nlohmann::json> stale_view_report(const NetworkState& state,
                                              const MemoryStore& workspace);

std::vector<Violation> check_all(const Trace& trace, const NetworkState& state,
                                 const MemoryStore& workspace,
                                 const RevisionLog& log,
                                 const RoleResourceMap& role_map);

}  // namespace masim
