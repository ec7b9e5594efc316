#include "doctest.h"
#include "helpers.hpp"
#include "masim/builtins.hpp"
#include "masim/engine.hpp"
#include "masim/invariants.hpp"

using namespace masim;
using namespace masim::test;

namespace {

RunResult run_bundled(const std::string& name, EnforcementMode mode) {
    Engine engine;
    return engine.run(*find_bundled(name), mode, 0);
}

int count_kind(const std::vector<Violation>& violations, ViolationKind kind) {
    int n = 0;
    for (const auto& v : violations) {
        if (v.kind == kind) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("termination scope: parent kill is clean, sibling kill is flagged") {
    Kernel kernel = make_kernel(EnforcementMode::permissive);
    AgentId root = kernel.bootstrap_root(default_root());
    AgentId b = kernel.spawn(root, worker_spec("b", MemoryMode::agent_agnostic));
    AgentId c = kernel.spawn(root, worker_spec("c", MemoryMode::agent_agnostic));
    kernel.terminate_agent(root, b);  // authorized: parent with kill
    auto clean = check_termination_scope(kernel.trace(), kernel.state());
    CHECK(clean.empty());

    kernel.terminate_agent(c, root);  // child killing root: flagged
    auto flagged = check_termination_scope(kernel.trace(), kernel.state());
    REQUIRE(flagged.size() == 1);
    CHECK(flagged[0].kind == ViolationKind::unauthorized_termination);
    CHECK(flagged[0].actor == c);
}

TEST_CASE("memory isolation: declared bounds are enforced per mode") {
    Kernel kernel = make_kernel(EnforcementMode::permissive);
    AgentId root = kernel.bootstrap_root(default_root());

    // Empty parent store: replication equals the bound for every mode.
    kernel.spawn(root, worker_spec("empty", MemoryMode::agent_agnostic));
    CHECK(check_memory_isolation(kernel.trace(), kernel.state()).empty());

    // Now the parent holds data; an agent-agnostic declaration plus full
    // replication exceeds the empty bound.
    kernel.inject(root, "x", lbl(0));
    kernel.spawn(root, worker_spec("leaky", MemoryMode::agent_agnostic));
    auto violations = check_memory_isolation(kernel.trace(), kernel.state());
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].kind == ViolationKind::improper_inheritance);
    CHECK(violations[0].detail["child_name"] == "leaky");
}

TEST_CASE("memory isolation: enforced inheritance stays within the selector") {
    Kernel kernel = make_kernel(EnforcementMode::enforced);
    AgentId root = kernel.bootstrap_root(default_root());
    SegmentId keep = kernel.inject(root, "keep", lbl(0));
    kernel.inject(root, "drop", lbl(0));
    SpawnSpec spec = worker_spec("w", MemoryMode::inherit_partial, 1);
    spec.selector = std::vector<SegmentId>{keep};
    AgentId child = kernel.spawn(root, spec);

    CHECK(check_memory_isolation(kernel.trace(), kernel.state()).empty());
    // Subset oracle: every inherited id must be in the declared selector.
    for (const auto& seg : kernel.state().agent(child).memory.segments()) {
        CHECK(seg.id == keep);
    }
}

TEST_CASE("access control: in-scope tools pass, out-of-scope executed tools "
          "are flagged") {
    Kernel kernel = make_kernel(EnforcementMode::permissive);
    AgentId root = kernel.bootstrap_root(default_root());
    kernel.init_workspace_segment("f", "x", lbl(0));
    SpawnSpec spec = worker_spec("r", MemoryMode::agent_agnostic);
    spec.role = Role{"reader", lbl(1)};
    AgentId reader = kernel.spawn(root, spec);

    kernel.invoke_tool(reader, ToolInvocation{"read_segment", "f"});
    CHECK(check_access_control(kernel.trace(), kernel.state(),
                               kernel.role_map())
              .empty());

    kernel.invoke_tool(reader, ToolInvocation{"fs_chmod", "f"});
    auto violations =
        check_access_control(kernel.trace(), kernel.state(), kernel.role_map());
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].kind == ViolationKind::no_access_control);
    CHECK(violations[0].detail["tool"] == "fs_chmod");
}

TEST_CASE("divergence: no writes since the read yields an empty report") {
    Kernel kernel = make_kernel(EnforcementMode::permissive);
    AgentId root = kernel.bootstrap_root(default_root());
    kernel.init_workspace_segment("f", "x", lbl(0));
    kernel.invoke_tool(root, ToolInvocation{"read_segment", "f"});
    ToolInvocation commit{"write_segment", "out"};
    commit.content = "ok";
    commit.derived_from = {"f"};
    kernel.invoke_tool(root, commit);
    CHECK(check_divergence(kernel.trace(), kernel.state(), kernel.workspace(),
                           kernel.revision_log())
              .empty());
    CHECK(stale_view_report(kernel.state(), kernel.workspace()).empty());
}

TEST_CASE("divergence report equals a brute-force diff of cached reads") {
    Kernel kernel = make_kernel(EnforcementMode::permissive);
    AgentId root = kernel.bootstrap_root(default_root());
    kernel.init_workspace_segment("a", "1", lbl(0));
    kernel.init_workspace_segment("b", "2", lbl(0));
    AgentId w = kernel.spawn(root, worker_spec("w", MemoryMode::inherit_full));
    kernel.invoke_tool(w, ToolInvocation{"read_segment", "a"});
    kernel.invoke_tool(w, ToolInvocation{"read_segment", "b"});
    ToolInvocation write{"write_segment", "a"};
    write.content = "1-changed";
    kernel.invoke_tool(root, write);

    auto report = stale_view_report(kernel.state(), kernel.workspace());

    // Brute-force oracle: diff every recorded read against current content.
    std::size_t expected = 0;
    for (const auto& [id, rec] : kernel.state().agents()) {
        (void)id;
        for (const auto& read : rec.reads) {
            const MemorySegment* cur = kernel.workspace().find(read.seg);
            if (cur != nullptr && cur->content != read.content) ++expected;
        }
    }
    CHECK(report.size() == expected);
    REQUIRE(report.size() == 1);
    CHECK(report[0]["name"] == "a");
    CHECK(report[0]["snapshot"] == "1");
    CHECK(report[0]["current"] == "1-changed");
}

TEST_CASE("checkers are read-only over trace and state") {
    RunResult result = run_bundled("memory_divergence", EnforcementMode::permissive);
    const Kernel& kernel = *result.kernel;
    const std::uint64_t state_before = kernel.state_digest();
    const std::string trace_before = kernel.trace().hash_hex();
    for (int i = 0; i < 3; ++i) {
        (void)check_all(kernel.trace(), kernel.state(), kernel.workspace(),
                        kernel.revision_log(), kernel.role_map());
        (void)stale_view_report(kernel.state(), kernel.workspace());
    }
    CHECK(kernel.state_digest() == state_before);
    CHECK(kernel.trace().hash_hex() == trace_before);
}

TEST_CASE("checker output is deterministic") {
    RunResult result =
        run_bundled("sibling_termination", EnforcementMode::permissive);
    auto first = check_all(result.kernel->trace(), result.kernel->state(),
                           result.kernel->workspace(),
                           result.kernel->revision_log(),
                           result.kernel->role_map());
    auto second = check_all(result.kernel->trace(), result.kernel->state(),
                            result.kernel->workspace(),
                            result.kernel->revision_log(),
                            result.kernel->role_map());
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].to_json() == second[i].to_json());
    }
}

TEST_CASE("every enforced bundled run is violation-free; every permissive run "
          "shows exactly its own kind") {
    const std::map<std::string, ViolationKind> table = {
        {"memory_divergence", ViolationKind::memory_divergence},
        {"access_control", ViolationKind::no_access_control},
        {"inheritance", ViolationKind::improper_inheritance},
        {"sibling_termination", ViolationKind::unauthorized_termination},
    };
    for (const auto& [name, kind] : table) {
        RunResult permissive = run_bundled(name, EnforcementMode::permissive);
        CHECK(count_kind(permissive.report.violations, kind) >= 1);
        CHECK(static_cast<int>(permissive.report.violations.size()) ==
              count_kind(permissive.report.violations, kind));

        RunResult enforced = run_bundled(name, EnforcementMode::enforced);
        CHECK(enforced.report.violations.empty());
        CHECK_FALSE(enforced.report.defenses.empty());
    }
}
