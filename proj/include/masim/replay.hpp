#pragma once

// Trace replay: rebuilds the final run state purely from trace events,
// recomputes the checker verdicts and summary, and compares them with the
// stored footer. Every state delta has a trace event, so the rebuilt state is
// complete; its digest matches the live kernel's for a genuine trace.

#include <string>
#include <string_view>
#include <vector>

#include "masim/kernel.hpp"
#include "masim/trace.hpp"

namespace masim {

struct RebuiltState {
    SensitivityLattice lattice;
    RoleResourceMap role_map;
    NetworkState network;
    MemoryStore workspace;
    RevisionLog revision_log;
    CapabilityRegistry registry;
    std::vector<PendingTermination> pending;
    std::vector<std::string> exec_log;
    std::vector<std::string> persistence;

    RebuiltState() : workspace(std::nullopt) {}

    std::uint64_t digest() const {
        return components_digest(network, workspace, registry, revision_log,
                                 pending, exec_log, persistence);
    }
};

RebuiltState rebuild_state(const Trace& trace);

struct ReplayResult {
    ParsedTrace parsed;
    bool hash_ok = false;
    bool verdicts_ok = false;
    nlohmann::json recomputed_summary;

    bool ok() const { return hash_ok && verdicts_ok; }
};

// Throws scenario_invalid on unparseable input.
ReplayResult replay_verify(std::string_view ndjson_text);

}  // namespace masim
