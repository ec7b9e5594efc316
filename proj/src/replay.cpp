#include "masim/replay.hpp"

#include <algorithm>

#include "masim/engine.hpp"
#include "masim/errors.hpp"
#include "masim/hash.hpp"
#include "masim/invariants.hpp"
#include "masim/report.hpp"

namespace masim {

namespace {

Capability parse_capability_token(const std::string& text) {
    if (text.rfind("kill:", 0) == 0) {
        return Capability{CapabilityKind::kill,
                          AgentId{static_cast<std::uint32_t>(
                              std::stoul(text.substr(5)))}};
    }
    auto kind = parse_capability_kind(text);
    if (!kind) {
        fail(Errc::scenario_invalid,
             "trace: unknown capability '" + text + "'");
    }
    return Capability{*kind, std::nullopt};
}

CapabilitySet parse_caps(const nlohmann::json& arr) {
    CapabilitySet out;
    for (const auto& c : arr) {
        out.add(parse_capability_token(c.get<std::string>()));
    }
    return out;
}

MemorySegment segment_from_json(const nlohmann::json& j,
                                const SensitivityLattice& lattice) {
    MemorySegment seg;
    seg.id = SegmentId{j.at("seg").get<std::uint64_t>()};
    seg.label = lattice.require(j.at("label").get<std::string>());
    seg.content = j.at("content").get<std::string>();
    seg.adversarial = j.value("adversarial", false);
    seg.created_at = j.value("created_at", LogicalTime{0});
    seg.executable = j.value("executable", false);
    if (j.contains("name")) seg.name = j.at("name").get<std::string>();
    if (j.contains("trigger")) {
        const auto& t = j.at("trigger");
        seg.trigger = SegmentTrigger{t.at("keyword").get<std::string>(),
                                     t.at("tool").get<std::string>(),
                                     t.at("target").get<std::string>()};
    }
    return seg;
}

}  // namespace

RebuiltState rebuild_state(const Trace& trace) {
    RebuiltState rs;
    rs.lattice = trace.meta.lattice.empty()
                     ? SensitivityLattice()
                     : SensitivityLattice(trace.meta.lattice);
    for (const auto& [role, body] : trace.meta.roles.items()) {
        std::set<ToolId> tools;
        for (const auto& t : body.value("tools", nlohmann::json::array())) {
            tools.insert(t.get<std::string>());
        }
        rs.role_map.declare(role, tools);
    }

    for (const auto& ev : trace.events) {
        const auto& d = ev.detail;
        if (ev.kind == "root") {
            AgentRecord rec;
            rec.id = *ev.actor;
            rec.name = d.at("name").get<std::string>();
            rec.role = Role{d.at("role").get<std::string>(),
                            rs.lattice.require(
                                d.at("clearance").get<std::string>())};
            rec.capabilities = parse_caps(d.at("caps"));
            rec.memory = MemoryStore(rec.id);
            rec.lifespan = Lifespan::persistent;
            rec.interaction =
                parse_interaction(d.at("interaction").get<std::string>())
                    .value_or(Interaction::session_based);
            rec.spawned_at = ev.t;
            rec.declared_mode = MemoryMode::agent_agnostic;
            rs.network.add_agent_raw(std::move(rec));
            rs.network.set_root(*ev.actor);
            if (d.value("registered", false)) {
                rs.registry.register_agent(*ev.actor, parse_caps(d.at("caps")),
                                           d.at("role").get<std::string>(),
                                           rs.role_map, ev.t);
            }
        } else if (ev.kind == "workspace-init") {
            MemorySegment seg;
            seg.id = SegmentId{d.at("seg").get<std::uint64_t>()};
            seg.label = rs.lattice.require(d.at("label").get<std::string>());
            seg.content = d.at("content").get<std::string>();
            seg.created_at = ev.t;
            seg.name = d.at("name").get<std::string>();
            rs.workspace.append(seg);
            rs.revision_log.append(
                {RevisionOp::update, seg.id, ev.t, rs.network.root()});
        } else if (ev.kind == "spawn") {
            AgentRecord rec;
            rec.id = AgentId{d.at("child").get<std::uint32_t>()};
            rec.name = d.at("name").get<std::string>();
            rec.role = Role{d.at("role").get<std::string>(),
                            rs.lattice.require(
                                d.at("clearance").get<std::string>())};
            rec.capabilities = parse_caps(d.at("caps"));
            rec.memory = MemoryStore(rec.id);
            for (const auto& seg : d.value("inherited",
                                           nlohmann::json::array())) {
                rec.memory.append(segment_from_json(seg, rs.lattice));
            }
            rec.lifespan = parse_lifespan(d.at("lifespan").get<std::string>())
                               .value_or(Lifespan::one_time);
            rec.interaction =
                parse_interaction(d.at("interaction").get<std::string>())
                    .value_or(Interaction::task_oriented);
            rec.parent = *ev.actor;
            rec.declared_mode =
                parse_memory_mode(d.at("declared_mode").get<std::string>())
                    .value_or(MemoryMode::agent_agnostic);
            if (d.contains("selector") && !d["selector"].is_null()) {
                std::vector<SegmentId> sel;
                for (const auto& s : d["selector"]) {
                    sel.push_back(SegmentId{s.get<std::uint64_t>()});
                }
                rec.declared_selector = std::move(sel);
            }
            rec.spawned_at = ev.t;
            const AgentId child = rec.id;
            rs.network.add_agent_raw(std::move(rec));
            rs.network.add_edge_raw(*ev.actor, child);
            if (d.value("registered", false)) {
                rs.registry.register_agent(child, parse_caps(d.at("caps")),
                                           d.at("role").get<std::string>(),
                                           rs.role_map, ev.t);
            }
        } else if (ev.kind == "inject") {
            AgentRecord& rec = rs.network.agent(
                AgentId{d.at("target").get<std::uint32_t>()});
            MemorySegment seg;
            seg.id = SegmentId{d.at("seg").get<std::uint64_t>()};
            seg.label = rs.lattice.require(d.at("label").get<std::string>());
            seg.content = d.at("content").get<std::string>();
            seg.adversarial = true;
            seg.created_at = ev.t;
            if (d.contains("name")) seg.name = d.at("name").get<std::string>();
            if (d.contains("trigger")) {
                const auto& t = d.at("trigger");
                seg.trigger =
                    SegmentTrigger{t.at("keyword").get<std::string>(),
                                   t.at("tool").get<std::string>(),
                                   t.at("target").get<std::string>()};
            }
            rec.memory.append(seg);
        } else if (ev.kind == "tool") {
            if (d.value("outcome", "") != "executed") continue;
            const std::string tool = d.at("tool").get<std::string>();
            AgentRecord& rec = rs.network.agent(*ev.actor);
            if (tool == "read_segment") {
                const bool own = d.value("own_store", false);
                rec.record_read({SegmentId{d.at("seg").get<std::uint64_t>()},
                                 d.at("target").get<std::string>(),
                                 d.at("result").get<std::string>(), ev.t,
                                 !own});
            } else if (tool == "write_segment" || tool == "fs_write") {
                const bool own = d.value("own_store", false);
                MemoryStore& store = own ? rec.memory : rs.workspace;
                const SegmentId seg_id{d.at("seg").get<std::uint64_t>()};
                if (MemorySegment* existing = store.find(seg_id)) {
                    existing->content = d.at("content").get<std::string>();
                } else {
                    MemorySegment seg;
                    seg.id = seg_id;
                    seg.label = d.contains("label")
                                    ? rs.lattice.require(
                                          d.at("label").get<std::string>())
                                    : rec.role.clearance;
                    seg.content = d.at("content").get<std::string>();
                    seg.created_at = ev.t;
                    seg.name = d.at("target").get<std::string>();
                    store.append(seg);
                }
                rs.revision_log.append(
                    {RevisionOp::update, seg_id, ev.t, *ev.actor});
            } else if (tool == "fs_chmod") {
                if (MemorySegment* seg = rs.workspace.find(
                        SegmentId{d.at("seg").get<std::uint64_t>()})) {
                    seg->executable = true;
                }
            } else if (tool == "exec") {
                rs.exec_log.push_back(d.at("target").get<std::string>());
            } else if (tool == "autostart_register") {
                rs.persistence.push_back(d.at("target").get<std::string>());
            }
        } else if (ev.kind == "terminate") {
            const std::string outcome = d.value("outcome", "");
            if (outcome == "executed") {
                rs.network
                    .agent(AgentId{d.at("target").get<std::uint32_t>()})
                    .alive = false;
            } else if (outcome == "suspended") {
                PendingTermination p;
                p.id = d.at("request").get<std::uint64_t>();
                p.actor = *ev.actor;
                p.target = AgentId{d.at("target").get<std::uint32_t>()};
                p.approver = AgentId{d.at("approver").get<std::uint32_t>()};
                p.requested_at = ev.t;
                rs.pending.push_back(p);
            }
        } else if (ev.kind == "resolve") {
            if (!d.contains("request")) continue;  // empty resolution note
            const std::uint64_t request = d.at("request").get<std::uint64_t>();
            rs.pending.erase(
                std::remove_if(rs.pending.begin(), rs.pending.end(),
                               [&](const PendingTermination& p) {
                                   return p.id == request;
                               }),
                rs.pending.end());
        } else if (ev.kind == "revoke") {
            rs.revision_log.append(
                {RevisionOp::revoke, SegmentId{d.at("seg").get<std::uint64_t>()},
                 ev.t, *ev.actor});
        }
        // message / work / skip / error leave no state behind.
    }
    if (!trace.events.empty()) {
        rs.network.set_clock(trace.events.back().t);
    }
    return rs;
}

ReplayResult replay_verify(std::string_view ndjson_text) {
    ReplayResult result;
    result.parsed = parse_trace(ndjson_text);
    result.hash_ok =
        !result.parsed.stored_hash.empty() &&
        result.parsed.stored_hash == result.parsed.computed_hash;

    const Trace& trace = result.parsed.trace;
    RebuiltState rs = rebuild_state(trace);

    Report report;
    report.scenario = trace.meta.scenario;
    report.mode = trace.meta.mode;
    report.seed = trace.meta.seed;
    report.violations = check_all(trace, rs.network, rs.workspace,
                                  rs.revision_log, rs.role_map);
    report.defenses = extract_defenses(trace);
    report.informational = stale_view_report(rs.network, rs.workspace);

    result.recomputed_summary = summary_json(
        report, contamination_in(rs.network), hex64(rs.digest()));

    nlohmann::json stored = result.parsed.summary;
    stored.erase("kind");
    stored.erase("hash");
    result.verdicts_ok = stored == result.recomputed_summary;
    return result;
}

}  // namespace masim
