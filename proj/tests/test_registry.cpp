#include "doctest.h"
#include "helpers.hpp"
#include "masim/errors.hpp"
#include "masim/registry.hpp"

using namespace masim;
using namespace masim::test;

namespace {

// Root 0 with children 1 and 2; 1 has child 3.
NetworkState family() {
    NetworkState state;
    for (std::uint32_t i = 0; i < 4; ++i) {
        AgentRecord rec;
        rec.id = AgentId{i};
        rec.name = "a" + std::to_string(i);
        rec.role = Role{"worker", lbl(1)};
        state.add_agent_raw(std::move(rec));
    }
    state.set_root(AgentId{0});
    state.add_edge_raw(AgentId{0}, AgentId{1});
    state.add_edge_raw(AgentId{0}, AgentId{2});
    state.add_edge_raw(AgentId{1}, AgentId{3});
    return state;
}

}  // namespace

TEST_CASE("register derives resources from the role map") {
    CapabilityRegistry registry;
    const RegistryEntry& entry = registry.register_agent(
        AgentId{1}, caps({CapabilityKind::access_memory}), "reader",
        default_role_map(), 4);
    CHECK(entry.resources == std::set<ToolId>{"read_segment"});
    CHECK(entry.registered_at == 4);
    CHECK(registry.registered(AgentId{1}));
}

TEST_CASE("second registration for the same agent fails") {
    CapabilityRegistry registry;
    registry.register_agent(AgentId{1}, {}, "reader", default_role_map(), 1);
    CHECK_THROWS_AS(registry.register_agent(AgentId{1}, {}, "reader",
                                            default_role_map(), 2),
                    KernelError);
}

TEST_CASE("registering an unmapped role fails") {
    CapabilityRegistry registry;
    CHECK_THROWS_AS(registry.register_agent(AgentId{1}, {}, "nonesuch",
                                            default_role_map(), 1),
                    KernelError);
}

TEST_CASE("registry entries never change after registration") {
    CapabilityRegistry registry;
    NetworkState state = family();
    registry.register_agent(AgentId{1}, caps({CapabilityKind::kill}), "reader",
                            default_role_map(), 1);
    const std::uint64_t digest = entry_digest(*registry.entry(AgentId{1}));
    // Exercise the decision path heavily; the stored entry must not move.
    for (int i = 0; i < 100; ++i) {
        (void)registry.decide(AgentId{1}, ActionRef::for_tool("exec"), state);
        (void)registry.decide(
            AgentId{1},
            ActionRef::structural({CapabilityKind::kill, AgentId{3}}), state);
    }
    CHECK(entry_digest(*registry.entry(AgentId{1})) == digest);
}

TEST_CASE("decide: unregistered agents are denied everything") {
    CapabilityRegistry registry;
    NetworkState state = family();
    PolicyDecision d =
        registry.decide(AgentId{1}, ActionRef::for_tool("read_segment"), state);
    CHECK(d.verdict == Verdict::deny);
    CHECK(d.reason == reason::unregistered);
}

TEST_CASE("decide: tools check the registered resource set") {
    CapabilityRegistry registry;
    NetworkState state = family();
    registry.register_agent(AgentId{1}, {}, "reader", default_role_map(), 1);
    CHECK(registry.decide(AgentId{1}, ActionRef::for_tool("read_segment"), state)
              .permitted());
    PolicyDecision d =
        registry.decide(AgentId{1}, ActionRef::for_tool("exec"), state);
    CHECK_FALSE(d.permitted());
    CHECK(d.reason == reason::tool_not_in_role);
}

TEST_CASE("decide: structural operations check the capability set") {
    CapabilityRegistry registry;
    NetworkState state = family();
    registry.register_agent(AgentId{1}, caps({CapabilityKind::spawn}), "reader",
                            default_role_map(), 1);
    CHECK(registry
              .decide(AgentId{1},
                      ActionRef::structural({CapabilityKind::spawn, {}}), state)
              .permitted());
    PolicyDecision d = registry.decide(
        AgentId{1}, ActionRef::structural({CapabilityKind::communicate, {}}),
        state);
    CHECK_FALSE(d.permitted());
    CHECK(d.reason == reason::capability_missing);
}

TEST_CASE("decide: kill requires the parent edge or root") {
    CapabilityRegistry registry;
    NetworkState state = family();
    registry.register_agent(AgentId{0}, caps({CapabilityKind::kill}), "worker",
                            default_role_map(), 1);
    registry.register_agent(AgentId{1}, caps({CapabilityKind::kill}), "worker",
                            default_role_map(), 2);

    // Parent over direct child: permit.
    CHECK(registry
              .decide(AgentId{1},
                      ActionRef::structural({CapabilityKind::kill, AgentId{3}}),
                      state)
              .permitted());
    // Root over a grandchild: permit.
    CHECK(registry
              .decide(AgentId{0},
                      ActionRef::structural({CapabilityKind::kill, AgentId{3}}),
                      state)
              .permitted());
    // Sibling: denied with the approval reason code.
    PolicyDecision sibling = registry.decide(
        AgentId{1}, ActionRef::structural({CapabilityKind::kill, AgentId{2}}),
        state);
    CHECK_FALSE(sibling.permitted());
    CHECK(sibling.reason == reason::kill_sibling_needs_parent);
    // Non-parent non-sibling (child over root): plain denial.
    PolicyDecision up = registry.decide(
        AgentId{1}, ActionRef::structural({CapabilityKind::kill, AgentId{0}}),
        state);
    CHECK_FALSE(up.permitted());
    CHECK(up.reason == reason::kill_not_parent);
}

TEST_CASE("decide: explicit kill override permits a non-parent") {
    CapabilityRegistry registry;
    NetworkState state = family();
    CapabilitySet with_override;
    with_override.add(Capability{CapabilityKind::kill, AgentId{2}});
    registry.register_agent(AgentId{1}, with_override, "worker",
                            default_role_map(), 1);
    CHECK(registry
              .decide(AgentId{1},
                      ActionRef::structural({CapabilityKind::kill, AgentId{2}}),
                      state)
              .permitted());
    // The override is target-specific.
    CHECK_FALSE(registry
                    .decide(AgentId{1},
                            ActionRef::structural(
                                {CapabilityKind::kill, AgentId{0}}),
                            state)
                    .permitted());
}

TEST_CASE("decide: parent without the kill capability is denied") {
    CapabilityRegistry registry;
    NetworkState state = family();
    registry.register_agent(AgentId{1}, {}, "worker", default_role_map(), 1);
    PolicyDecision d = registry.decide(
        AgentId{1}, ActionRef::structural({CapabilityKind::kill, AgentId{3}}),
        state);
    CHECK_FALSE(d.permitted());
    CHECK(d.reason == reason::capability_missing);
}

TEST_CASE("decide is deterministic for identical inputs") {
    CapabilityRegistry registry;
    NetworkState state = family();
    registry.register_agent(AgentId{1}, caps({CapabilityKind::kill}), "reader",
                            default_role_map(), 1);
    for (const auto& action :
         {ActionRef::for_tool("read_segment"), ActionRef::for_tool("exec"),
          ActionRef::structural({CapabilityKind::kill, AgentId{2}})}) {
        PolicyDecision first = registry.decide(AgentId{1}, action, state);
        for (int i = 0; i < 10; ++i) {
            PolicyDecision again = registry.decide(AgentId{1}, action, state);
            CHECK(again.verdict == first.verdict);
            CHECK(again.reason == first.reason);
        }
    }
}
