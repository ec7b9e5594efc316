#include "masim/invariants.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace masim {

const char* violation_kind_name(ViolationKind kind) noexcept {
    switch (kind) {
        case ViolationKind::unauthorized_termination:
            return "unauthorized-termination";
        case ViolationKind::improper_inheritance:
            return "improper-inheritance";
        case ViolationKind::no_access_control: return "no-access-control";
        case ViolationKind::memory_divergence: return "memory-divergence";
    }
    return "unknown";
}

nlohmann::json Violation::to_json() const {
    nlohmann::json j;
    j["kind"] = violation_kind_name(kind);
    j["actor"] = actor.value;
    j["at"] = at;
    j["detail"] = detail;
    return j;
}

namespace {

bool termination_authorized_in(const NetworkState& state, AgentId actor,
                               AgentId target) {
    const AgentRecord& rec = state.agent(actor);
    if (rec.capabilities.has_kill_override(target)) {
        return true;
    }
    return rec.capabilities.has(CapabilityKind::kill) &&
           (state.has_edge(actor, target) || actor == state.root());
}

}  // namespace

std::vector<Violation> check_termination_scope(const Trace& trace,
                                               const NetworkState& state) {
    std::vector<Violation> out;
    for (const auto& ev : trace.events) {
        if (ev.kind != "terminate" || !ev.actor) continue;
        if (ev.detail.value("outcome", "") != "executed") continue;
        const AgentId actor = *ev.actor;
        const AgentId target{ev.detail.at("target").get<std::uint32_t>()};
        if (!state.exists(actor) || !state.exists(target)) continue;
        if (termination_authorized_in(state, actor, target)) continue;
        Violation v;
        v.kind = ViolationKind::unauthorized_termination;
        v.actor = actor;
        v.at = ev.t;
        v.detail["target"] = target.value;
        v.detail["target_name"] = state.agent(target).name;
        v.detail["actor_name"] = state.agent(actor).name;
        const bool is_parent = state.has_edge(actor, target);
        const bool is_root = actor == state.root();
        v.detail["reason"] = !state.agent(actor).capabilities.has(
                                 CapabilityKind::kill)
                                 ? "kill-capability-missing"
                                 : (!is_parent && !is_root
                                        ? "actor-not-parent-or-root"
                                        : "unauthorized");
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Violation> check_memory_isolation(const Trace& trace,
                                              const NetworkState& state) {
    std::vector<Violation> out;
    for (const auto& ev : trace.events) {
        if (ev.kind != "spawn" || !ev.actor) continue;
        const AgentId child{ev.detail.at("child").get<std::uint32_t>()};
        const std::string declared = ev.detail.value("declared_mode", "");

        // (id, digest) pairs are the comparison granularity: same segment,
        // same content.
        std::set<std::pair<std::uint64_t, std::string>> parent_set;
        for (const auto& p : ev.detail.value("parent_segments",
                                             nlohmann::json::array())) {
            parent_set.emplace(p.at("seg").get<std::uint64_t>(),
                               p.at("digest").get<std::string>());
        }
        std::set<std::uint64_t> selector_set;
        if (ev.detail.contains("selector") && !ev.detail["selector"].is_null()) {
            for (const auto& s : ev.detail["selector"]) {
                selector_set.insert(s.get<std::uint64_t>());
            }
        }

        nlohmann::json exceeded = nlohmann::json::array();
        for (const auto& seg : ev.detail.value("inherited",
                                               nlohmann::json::array())) {
            const std::uint64_t id = seg.at("seg").get<std::uint64_t>();
            const std::string digest = seg.at("digest").get<std::string>();
            bool within = false;
            if (declared == "inherit-full") {
                within = parent_set.contains({id, digest});
            } else if (declared == "inherit-partial") {
                within = selector_set.contains(id) &&
                         parent_set.contains({id, digest});
            } else {
                within = false;  // agent-agnostic: empty bound
            }
            if (!within) {
                exceeded.push_back(id);
            }
        }
        if (exceeded.empty()) continue;

        Violation v;
        v.kind = ViolationKind::improper_inheritance;
        v.actor = *ev.actor;
        v.at = ev.t;
        v.detail["child"] = child.value;
        v.detail["child_name"] = ev.detail.value("name", "");
        v.detail["declared_mode"] = declared;
        v.detail["exceeded"] = exceeded;
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Violation> check_access_control(const Trace& trace,
                                            const NetworkState& state,
                                            const RoleResourceMap& role_map) {
    std::vector<Violation> out;
    for (const auto& ev : trace.events) {
        if (ev.kind != "tool" || !ev.actor) continue;
        if (ev.detail.value("outcome", "") != "executed") continue;
        const AgentId actor = *ev.actor;
        if (actor == state.root()) continue;  // the invariant scopes subagents
        if (!state.exists(actor)) continue;
        const std::string tool = ev.detail.at("tool").get<std::string>();
        const std::string role = state.agent(actor).role.name;
        const std::set<ToolId>* allowed = role_map.find(role);
        if (allowed != nullptr && allowed->contains(tool)) continue;
        Violation v;
        v.kind = ViolationKind::no_access_control;
        v.actor = actor;
        v.at = ev.t;
        v.detail["tool"] = tool;
        v.detail["role"] = role;
        v.detail["actor_name"] = state.agent(actor).name;
        v.detail["target"] = ev.detail.value("target", "");
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Violation> check_divergence(const Trace& trace,
                                        const NetworkState& state,
                                        const MemoryStore& workspace,
                                        const RevisionLog& log) {
    std::vector<Violation> out;
    for (const auto& ev : trace.events) {
        if (ev.kind != "tool" || !ev.actor) continue;
        if (ev.detail.value("outcome", "") != "executed") continue;
        if (!ev.detail.contains("sources")) continue;
        const AgentId actor = *ev.actor;
        for (const auto& src : ev.detail["sources"]) {
            const SegmentId seg{src.at("seg").get<std::uint64_t>()};
            const LogicalTime acquired = src.at("acquired_at").get<LogicalTime>();
            // Evaluate as of the commit, not as of now: later events must not
            // retroactively poison an honest commit.
            const ValidityVerdict v = log.validity(seg, acquired, ev.t);
            if (v.ok()) continue;
            Violation viol;
            viol.kind = ViolationKind::memory_divergence;
            viol.actor = actor;
            viol.at = ev.t;
            viol.detail["seg"] = seg.value;
            viol.detail["source"] = src.value("name", "");
            viol.detail["acquired_at"] = acquired;
            viol.detail["validity"] = validity_name(v.state);
            viol.detail["validity_at"] = v.at;
            viol.detail["committed"] = ev.detail.value("target", "");
            if (state.exists(actor)) {
                const CachedRead* read = state.agent(actor).last_read(seg);
                if (read != nullptr) {
                    viol.detail["snapshot"] = read->content;
                }
            }
            if (const MemorySegment* cur = workspace.find(seg)) {
                viol.detail["current"] = cur->content;
            }
            out.push_back(std::move(viol));
        }
    }
    return out;
}

std::vector<nlohmann::json> stale_view_report(const NetworkState& state,
                                              const MemoryStore& workspace) {
    std::vector<nlohmann::json> out;
    for (const auto& [id, rec] : state.agents()) {
        for (const auto& read : rec.reads) {
            const MemorySegment* current = nullptr;
            std::string where;
            if (read.from_workspace) {
                current = workspace.find(read.seg);
                where = "workspace";
            } else if (rec.parent && state.exists(*rec.parent)) {
                current = state.agent(*rec.parent).memory.find(read.seg);
                where = "parent";
            }
            if (current == nullptr || current->content == read.content) {
                continue;
            }
            out.push_back({{"agent", id.value},
                           {"agent_name", rec.name},
                           {"seg", read.seg.value},
                           {"name", read.name},
                           {"read_at", read.at},
                           {"snapshot", read.content},
                           {"current", current->content},
                           {"where", where},
                           {"severity", "informational"}});
        }
    }
    return out;
}

std::vector<Violation> check_all(const Trace& trace, const NetworkState& state,
                                 const MemoryStore& workspace,
                                 const RevisionLog& log,
                                 const RoleResourceMap& role_map) {
    std::vector<Violation> out = check_termination_scope(trace, state);
    auto append = [&out](std::vector<Violation> more) {
        for (auto& v : more) out.push_back(std::move(v));
    };
    append(check_memory_isolation(trace, state));
    append(check_access_control(trace, state, role_map));
    append(check_divergence(trace, state, workspace, log));
    std::stable_sort(out.begin(), out.end(),
                     [](const Violation& a, const Violation& b) {
                         return a.at < b.at;
                     });
    return out;
}

}  // namespace masim
