#pragma once

// Shared fixtures for the test suites: canned kernels, label shorthands, and
// the random generators used by the property suites.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "masim/builtins.hpp"
#include "masim/engine.hpp"
#include "masim/kernel.hpp"

namespace masim::test {

inline const std::set<ToolId>& tool_universe() {
    static const std::set<ToolId> tools = {
        "exec",      "fs_write",     "fs_chmod",     "autostart_register",
        "web_fetch", "read_segment", "write_segment"};
    return tools;
}

inline RoleResourceMap default_role_map() {
    RoleResourceMap map;
    map.declare("orchestrator", tool_universe());
    map.declare("worker", {"read_segment", "write_segment"});
    map.declare("reader", {"read_segment"});
    map.declare("idle", {});
    return map;
}

inline SensitivityLabel lbl(int rank) {
    return SensitivityLabel{static_cast<std::uint8_t>(rank)};
}

inline CapabilitySet caps(std::initializer_list<CapabilityKind> kinds) {
    CapabilitySet out;
    for (auto k : kinds) out.add(k);
    return out;
}

inline RootSpec default_root(const std::string& role = "orchestrator") {
    RootSpec spec;
    spec.name = "main";
    spec.role = Role{role, lbl(2)};
    spec.capabilities = caps({CapabilityKind::spawn, CapabilityKind::kill,
                              CapabilityKind::delegate,
                              CapabilityKind::access_memory,
                              CapabilityKind::communicate,
                              CapabilityKind::user_interact});
    return spec;
}

inline Kernel make_kernel(EnforcementMode mode) {
    KernelConfig config;
    config.mode = mode;
    return Kernel(config, SensitivityLattice(), default_role_map(),
                  tool_universe());
}

inline SpawnSpec worker_spec(const std::string& name, MemoryMode mode,
                             int clearance = 1) {
    SpawnSpec spec;
    spec.name = name;
    spec.role = Role{"worker", lbl(clearance)};
    spec.capabilities = caps({CapabilityKind::access_memory,
                              CapabilityKind::communicate});
    spec.memory_mode = mode;
    spec.lifespan = Lifespan::one_time;
    spec.interaction = Interaction::task_oriented;
    return spec;
}

// Random store for the projection properties.
inline MemoryStore random_store(std::mt19937_64& rng, std::size_t max_segs = 12,
                                int max_rank = 2) {
    MemoryStore store(std::nullopt);
    const std::size_t n = rng() % (max_segs + 1);
    for (std::size_t i = 0; i < n; ++i) {
        MemorySegment seg;
        seg.id = SegmentId{rng()};
        seg.label = lbl(static_cast<int>(rng() % (max_rank + 1)));
        seg.content = "c" + std::to_string(rng() % 1000);
        seg.adversarial = (rng() % 7) == 0;
        store.append(seg);
    }
    return store;
}

// Random spawn tree grown through the kernel; returns the agent ids in spawn
// order (root first).
inline std::vector<AgentId> grow_random_tree(Kernel& kernel,
                                             std::mt19937_64& rng,
                                             std::size_t agents,
                                             MemoryMode mode,
                                             int child_clearance = 1) {
    std::vector<AgentId> ids;
    ids.push_back(kernel.bootstrap_root(default_root()));
    for (std::size_t i = 1; i < agents; ++i) {
        AgentId parent = ids[rng() % ids.size()];
        SpawnSpec spec = worker_spec("w" + std::to_string(i), mode,
                                     child_clearance);
        // Every node can spawn, so any node may become an interior parent.
        spec.capabilities =
            caps({CapabilityKind::access_memory, CapabilityKind::spawn});
        ids.push_back(kernel.spawn(parent, spec));
    }
    return ids;
}

}  // namespace masim::test
