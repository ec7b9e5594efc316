#include "masim/kernel.hpp"

#include <algorithm>

#include "masim/hash.hpp"

namespace masim {

namespace {

// Shared policy evaluation used by the registry in enforced mode and by the
// would-have-denied annotations in permissive mode.
PolicyDecision evaluate_policy(const CapabilitySet& caps,
                               const std::set<ToolId>& resources,
                               AgentId agent, const ActionRef& action,
                               const NetworkState& state) {
    if (action.kind == ActionRef::Kind::tool) {
        if (resources.contains(action.tool)) {
            return {Verdict::permit, "", ""};
        }
        return {Verdict::deny, reason::tool_not_in_role,
                "tool '" + action.tool + "' outside role resources"};
    }
    const Capability& cap = action.capability;
    if (cap.kind != CapabilityKind::kill) {
        if (caps.has(cap.kind)) {
            return {Verdict::permit, "", ""};
        }
        return {Verdict::deny, reason::capability_missing,
                std::string("capability '") + capability_kind_name(cap.kind) +
                    "' not held"};
    }
    if (!cap.kill_target) {
        return {Verdict::deny, reason::capability_missing,
                "kill requires a target"};
    }
    const AgentId target = *cap.kill_target;
    if (caps.has_kill_override(target)) {
        return {Verdict::permit, "", ""};
    }
    const bool structural = state.has_edge(agent, target) || agent == state.root();
    if (caps.has(CapabilityKind::kill) && structural) {
        return {Verdict::permit, "", ""};
    }
    if (state.siblings(agent, target)) {
        return {Verdict::deny, reason::kill_sibling_needs_parent,
                "sibling termination requires shared-parent approval"};
    }
    if (!caps.has(CapabilityKind::kill)) {
        return {Verdict::deny, reason::capability_missing,
                "capability 'kill' not held"};
    }
    return {Verdict::deny, reason::kill_not_parent,
            "actor is neither the target's parent nor the root"};
}

nlohmann::json trigger_json(const SegmentTrigger& t) {
    return nlohmann::json{
        {"keyword", t.keyword}, {"tool", t.tool}, {"target", t.target}};
}

}  // namespace

const char* termination_outcome_name(TerminationOutcome outcome) noexcept {
    switch (outcome) {
        case TerminationOutcome::executed: return "executed";
        case TerminationOutcome::denied: return "denied";
        case TerminationOutcome::suspended_pending_parent:
            return "suspended-pending-parent";
    }
    return "unknown";
}

const char* intercept_kind_name(InterceptOutcome::Kind kind) noexcept {
    switch (kind) {
        case InterceptOutcome::Kind::executed: return "executed";
        case InterceptOutcome::Kind::denied: return "denied";
        case InterceptOutcome::Kind::suspended: return "suspended";
        case InterceptOutcome::Kind::failed: return "failed";
        case InterceptOutcome::Kind::blocked_stale: return "blocked-stale";
        case InterceptOutcome::Kind::skipped: return "skipped";
    }
    return "unknown";
}

Kernel::Kernel(KernelConfig config, SensitivityLattice lattice,
               RoleResourceMap role_map, std::set<ToolId> tool_universe)
    : config_(config),
      lattice_(std::move(lattice)),
      role_map_(std::move(role_map)),
      tool_universe_(std::move(tool_universe)),
      workspace_(std::nullopt) {}

AgentRecord& Kernel::require_alive(AgentId id) {
    AgentRecord& rec = state_.agent(id);
    if (!rec.alive) {
        fail(Errc::already_terminated,
             "agent " + std::to_string(id.value) + " is terminated");
    }
    return rec;
}

void Kernel::require_tool_known(const ToolId& tool) const {
    if (!tool_universe_.contains(tool)) {
        fail(Errc::scenario_invalid,
             "tool '" + tool + "' not in the declared universe");
    }
}

PolicyDecision Kernel::hypothetical_decision(AgentId agent,
                                             const ActionRef& action) const {
    const AgentRecord& rec = state_.agent(agent);
    static const std::set<ToolId> kEmpty;
    const std::set<ToolId>* tools = role_map_.find(rec.role.name);
    return evaluate_policy(rec.capabilities, tools ? *tools : kEmpty, agent,
                           action, state_);
}

bool Kernel::termination_authorized(AgentId actor, AgentId target) const {
    const AgentRecord& rec = state_.agent(actor);
    if (rec.capabilities.has_kill_override(target)) {
        return true;
    }
    return rec.capabilities.has(CapabilityKind::kill) &&
           (state_.has_edge(actor, target) || actor == state_.root());
}

AgentId Kernel::bootstrap_root(const RootSpec& spec) {
    const LogicalTime now = tick();
    AgentId id = state_.allocate_id();

    AgentRecord rec;
    rec.id = id;
    rec.name = spec.name;
    rec.role = spec.role;
    rec.capabilities = spec.capabilities;
    rec.memory = MemoryStore(id);
    rec.lifespan = Lifespan::persistent;
    rec.interaction = spec.interaction;
    rec.spawned_at = now;
    rec.declared_mode = MemoryMode::agent_agnostic;
    state_.add_agent_raw(std::move(rec));
    state_.set_root(id);

    bool registered = false;
    if (config_.mode == EnforcementMode::enforced) {
        registry_.register_agent(id, spec.capabilities, spec.role.name,
                                 role_map_, now);
        registered = true;
    }

    nlohmann::json detail;
    detail["name"] = spec.name;
    detail["role"] = spec.role.name;
    detail["clearance"] = lattice_.name(spec.role.clearance);
    nlohmann::json caps = nlohmann::json::array();
    for (const auto& cap : spec.capabilities.entries()) {
        caps.push_back(capability_text(cap));
    }
    detail["caps"] = caps;
    detail["interaction"] = interaction_name(spec.interaction);
    detail["registered"] = registered;
    if (registered) {
        detail["resources"] = registry_.entry(id)->resources;
    }
    trace_.append({now, "root", id, std::move(detail)});
    return id;
}

SegmentId Kernel::init_workspace_segment(const std::string& name,
                                         const std::string& content,
                                         SensitivityLabel label) {
    const LogicalTime now = tick();
    SegmentId id = allocate_segment_id();
    MemorySegment seg;
    seg.id = id;
    seg.label = label;
    seg.content = content;
    seg.created_at = now;
    seg.name = name;
    workspace_.append(seg);
    segment_origin_[id] = std::nullopt;
    revision_log_.append({RevisionOp::update, id, now, state_.root()});

    nlohmann::json detail;
    detail["seg"] = id.value;
    detail["name"] = name;
    detail["content"] = content;
    detail["label"] = lattice_.name(label);
    trace_.append({now, "workspace-init", state_.root(), std::move(detail)});
    return id;
}

AgentId Kernel::spawn(AgentId parent, const SpawnSpec& spec) {
    const LogicalTime now = tick();
    AgentRecord& parent_rec = require_alive(parent);

    if (spec.interaction == Interaction::session_based &&
        spec.lifespan != Lifespan::persistent) {
        fail(Errc::scenario_invalid,
             "session-based agents must be persistent");
    }
    if (spec.memory_mode == MemoryMode::inherit_partial && !spec.selector) {
        fail(Errc::bad_selector, "inherit-partial requires a selector");
    }

    if (config_.mode == EnforcementMode::enforced) {
        const PolicyDecision d = registry_.decide(
            parent, ActionRef::structural({CapabilityKind::spawn, std::nullopt}),
            state_);
        if (!d.permitted()) {
            fail(Errc::capability_denied, d.reason + ": " + d.detail);
        }
    } else if (!parent_rec.capabilities.has(CapabilityKind::spawn)) {
        fail(Errc::capability_denied,
             "spawn not held by agent " + std::to_string(parent.value));
    }

    if (!spec.capabilities.generic_subset_of(parent_rec.capabilities)) {
        fail(Errc::privilege_escalation,
             "requested capabilities exceed the parent's");
    }
    for (const auto& cap : spec.capabilities.entries()) {
        if (cap.kind == CapabilityKind::kill && cap.kill_target &&
            !termination_authorized(parent, *cap.kill_target)) {
            fail(Errc::privilege_escalation,
                 "parent cannot grant kill over agent " +
                     std::to_string(cap.kill_target->value));
        }
    }
    if (config_.mode == EnforcementMode::enforced) {
        const auto& child_tools = role_map_.require(spec.role.name);
        const RegistryEntry* parent_entry = registry_.entry(parent);
        for (const auto& tool : child_tools) {
            if (parent_entry == nullptr ||
                !parent_entry->resources.contains(tool)) {
                fail(Errc::privilege_escalation,
                     "requested resource '" + tool + "' exceeds the parent's");
            }
        }
    }

    const AgentId id = state_.allocate_id();

    // Permissive mode reproduces the vulnerable framework: the child receives
    // a full replica of the parent's memory no matter which mode the spawn
    // declared. Enforced mode honors the declared mode and projects the
    // result through the child's clearance.
    MemoryStore child_store =
        config_.mode == EnforcementMode::enforced
            ? inherit(parent_rec.memory, spec.memory_mode, spec.selector,
                      EnforcementMode::enforced, spec.role.clearance, id)
            : inherit(parent_rec.memory, MemoryMode::inherit_full, std::nullopt,
                      EnforcementMode::permissive, spec.role.clearance, id);

    nlohmann::json excluded = nlohmann::json::array();
    if (config_.mode == EnforcementMode::enforced) {
        for (const auto& seg : parent_rec.memory.segments()) {
            if (child_store.find(seg.id) != nullptr) continue;
            std::string phase;
            if (spec.memory_mode == MemoryMode::agent_agnostic) {
                phase = "mode";
            } else if (spec.memory_mode == MemoryMode::inherit_partial &&
                       std::find(spec.selector->begin(), spec.selector->end(),
                                 seg.id) == spec.selector->end()) {
                phase = "selector";
            } else {
                phase = "projection";
            }
            excluded.push_back(
                {{"seg", seg.id.value}, {"phase", phase}});
        }
    }

    AgentRecord child;
    child.id = id;
    child.name = spec.name;
    child.role = spec.role;
    child.capabilities = spec.capabilities;
    child.memory = std::move(child_store);
    child.lifespan = spec.lifespan;
    child.interaction = spec.interaction;
    child.parent = parent;
    child.declared_mode = spec.memory_mode;
    child.declared_selector = spec.selector;
    child.spawned_at = now;

    nlohmann::json detail;
    detail["child"] = id.value;
    detail["name"] = spec.name;
    detail["role"] = spec.role.name;
    detail["clearance"] = lattice_.name(spec.role.clearance);
    nlohmann::json caps = nlohmann::json::array();
    for (const auto& cap : spec.capabilities.entries()) {
        caps.push_back(capability_text(cap));
    }
    detail["caps"] = caps;
    detail["lifespan"] = lifespan_name(spec.lifespan);
    detail["interaction"] = interaction_name(spec.interaction);
    detail["declared_mode"] = memory_mode_name(spec.memory_mode);
    if (spec.selector) {
        nlohmann::json sel = nlohmann::json::array();
        for (SegmentId s : *spec.selector) sel.push_back(s.value);
        detail["selector"] = sel;
    } else {
        detail["selector"] = nullptr;
    }
    nlohmann::json inherited = nlohmann::json::array();
    for (const auto& seg : child.memory.segments()) {
        nlohmann::json sj;
        sj["seg"] = seg.id.value;
        sj["label"] = lattice_.name(seg.label);
        sj["content"] = seg.content;
        sj["adversarial"] = seg.adversarial;
        sj["created_at"] = seg.created_at;
        sj["executable"] = seg.executable;
        if (seg.name) sj["name"] = *seg.name;
        if (seg.trigger) sj["trigger"] = trigger_json(*seg.trigger);
        sj["digest"] = hex64(segment_digest(seg));
        inherited.push_back(sj);
    }
    detail["inherited"] = inherited;
    nlohmann::json parent_segments = nlohmann::json::array();
    for (const auto& seg : parent_rec.memory.segments()) {
        parent_segments.push_back(
            {{"seg", seg.id.value}, {"digest", hex64(segment_digest(seg))}});
    }
    detail["parent_segments"] = parent_segments;
    detail["excluded"] = excluded;

    bool registered = false;
    if (config_.mode == EnforcementMode::enforced) {
        const RegistryEntry& entry = registry_.register_agent(
            id, spec.capabilities, spec.role.name, role_map_, now);
        detail["resources"] = entry.resources;
        registered = true;
    }
    detail["registered"] = registered;

    state_.add_agent_raw(std::move(child));
    state_.add_edge_raw(parent, id);
    trace_.append({now, "spawn", parent, std::move(detail)});
    return id;
}

TerminationOutcome Kernel::execute_termination(AgentId actor, AgentId target,
                                               nlohmann::json detail) {
    AgentRecord& target_rec = state_.agent(target);
    target_rec.alive = false;
    detail["outcome"] = "executed";
    detail["authorized"] = termination_authorized(actor, target);
    trace_.append({state_.clock(), "terminate", actor, std::move(detail)});
    return TerminationOutcome::executed;
}

TerminationOutcome Kernel::terminate_agent(AgentId actor, AgentId target) {
    const LogicalTime now = tick();
    require_alive(actor);
    AgentRecord& target_rec = state_.agent(target);
    if (!target_rec.alive) {
        fail(Errc::already_terminated,
             "agent " + std::to_string(target.value) + " already terminated");
    }

    nlohmann::json detail;
    detail["target"] = target.value;
    detail["via"] = "direct";

    const ActionRef action =
        ActionRef::structural({CapabilityKind::kill, target});

    if (config_.mode == EnforcementMode::permissive) {
        // Vulnerable behavior: the request always executes. Keep the verdict
        // enforcement would have produced so reports can quantify the delta.
        const PolicyDecision would = hypothetical_decision(actor, action);
        if (!would.permitted()) {
            detail["would_deny"] = true;
            detail["would_reason"] = would.reason;
        }
        return execute_termination(actor, target, std::move(detail));
    }

    const PolicyDecision d = registry_.decide(actor, action, state_);
    if (d.permitted()) {
        return execute_termination(actor, target, std::move(detail));
    }
    if (d.reason == reason::kill_sibling_needs_parent &&
        !config_.flat_deny_sibling_termination) {
        PendingTermination request;
        request.id = next_request_id_++;
        request.actor = actor;
        request.target = target;
        request.approver = *state_.parent_of(actor);
        request.requested_at = now;
        pending_.push_back(request);
        detail["outcome"] = "suspended";
        detail["reason"] = d.reason;
        detail["request"] = request.id;
        detail["approver"] = request.approver.value;
        trace_.append({now, "terminate", actor, std::move(detail)});
        return TerminationOutcome::suspended_pending_parent;
    }
    detail["outcome"] = "denied";
    detail["reason"] = d.reason;
    trace_.append({now, "terminate", actor, std::move(detail)});
    return TerminationOutcome::denied;
}

TerminationOutcome Kernel::resolve_pending_termination(AgentId approver,
                                                       std::uint64_t request_id,
                                                       bool approve) {
    const LogicalTime now = tick();
    auto it = std::find_if(
        pending_.begin(), pending_.end(),
        [&](const PendingTermination& p) { return p.id == request_id; });
    if (it == pending_.end()) {
        fail(Errc::unknown_request,
             "no pending termination request " + std::to_string(request_id));
    }
    if (it->approver != approver) {
        fail(Errc::not_authorized_approver,
             "agent " + std::to_string(approver.value) +
                 " is not the shared parent for request " +
                 std::to_string(request_id));
    }
    const PendingTermination request = *it;
    pending_.erase(it);

    nlohmann::json detail;
    detail["request"] = request.id;
    detail["approve"] = approve;
    detail["target"] = request.target.value;
    detail["requested_by"] = request.actor.value;

    if (!approve) {
        detail["outcome"] = "rejected";
        trace_.append({now, "resolve", approver, std::move(detail)});
        return TerminationOutcome::denied;
    }
    if (!state_.agent(request.target).alive) {
        detail["outcome"] = "target-already-terminated";
        trace_.append({now, "resolve", approver, std::move(detail)});
        return TerminationOutcome::denied;
    }
    detail["outcome"] = "executed";
    trace_.append({now, "resolve", approver, detail});

    nlohmann::json term_detail;
    term_detail["target"] = request.target.value;
    term_detail["via"] = "parent-approval";
    term_detail["requested_by"] = request.actor.value;
    term_detail["request"] = request.id;
    return execute_termination(approver, request.target,
                               std::move(term_detail));
}

SegmentId Kernel::inject(AgentId target, const std::string& content,
                         SensitivityLabel label,
                         std::optional<SegmentTrigger> trigger,
                         std::optional<std::string> seg_name) {
    const LogicalTime now = tick();
    AgentRecord& rec = require_alive(target);

    SegmentId id = allocate_segment_id();
    MemorySegment seg;
    seg.id = id;
    seg.label = label;
    seg.content = content;
    seg.adversarial = true;
    seg.created_at = now;
    seg.trigger = trigger;
    seg.name = seg_name;
    rec.memory.append(seg);
    segment_origin_[id] = target;

    nlohmann::json detail;
    detail["target"] = target.value;
    detail["seg"] = id.value;
    detail["label"] = lattice_.name(label);
    detail["content"] = content;
    if (seg_name) detail["name"] = *seg_name;
    if (trigger) detail["trigger"] = trigger_json(*trigger);
    trace_.append({now, "inject", target, std::move(detail)});
    return id;
}

InterceptOutcome Kernel::invoke_tool(AgentId actor, const ToolInvocation& inv) {
    const LogicalTime now = tick();
    require_alive(actor);
    require_tool_known(inv.tool);

    nlohmann::json detail;
    detail["tool"] = inv.tool;
    detail["target"] = inv.target;
    detail["own_store"] = inv.own_store;
    if (inv.tool == "write_segment" || inv.tool == "fs_write") {
        detail["content"] = inv.content;
        if (inv.label) detail["label"] = *inv.label;
        if (!inv.derived_from.empty()) detail["derived_from"] = inv.derived_from;
    }

    const ActionRef action = ActionRef::for_tool(inv.tool);
    if (config_.mode == EnforcementMode::enforced) {
        const PolicyDecision d = registry_.decide(actor, action, state_);
        if (!d.permitted()) {
            detail["outcome"] = "denied";
            detail["reason"] = d.reason;
            trace_.append({now, "tool", actor, std::move(detail)});
            InterceptOutcome out;
            out.kind = InterceptOutcome::Kind::denied;
            out.decision = d;
            return out;
        }
    } else {
        const PolicyDecision would = hypothetical_decision(actor, action);
        if (!would.permitted()) {
            detail["would_deny"] = true;
            detail["would_reason"] = would.reason;
        }
    }
    return execute_tool(actor, inv, detail);
}

InterceptOutcome Kernel::execute_tool(AgentId actor, const ToolInvocation& inv,
                                      nlohmann::json& detail) {
    const LogicalTime now = state_.clock();
    AgentRecord& rec = state_.agent(actor);
    InterceptOutcome out;

    auto fail_with = [&](const std::string& code) {
        detail["outcome"] = "failed";
        detail["error"] = code;
        trace_.append({now, "tool", actor, detail});
        out.kind = InterceptOutcome::Kind::failed;
        out.error = code;
        return out;
    };

    if (inv.tool == "read_segment") {
        MemoryStore& store = inv.own_store ? rec.memory : workspace_;
        const MemorySegment* seg = store.find_named(inv.target);
        if (seg == nullptr) {
            return fail_with("unknown-segment");
        }
        rec.record_read({seg->id, inv.target, seg->content, now,
                         !inv.own_store});
        detail["outcome"] = "executed";
        detail["seg"] = seg->id.value;
        detail["result"] = seg->content;
        trace_.append({now, "tool", actor, detail});
        out.kind = InterceptOutcome::Kind::executed;
        out.result = seg->content;
        return out;
    }

    if (inv.tool == "write_segment" || inv.tool == "fs_write") {
        // Commit handler: a write that declares source segments is checked
        // against the revision log before it lands. Enforced mode rejects the
        // commit when any source is stale or revoked relative to the moment
        // the writer acquired it; permissive mode records the verdict and
        // writes anyway.
        nlohmann::json sources = nlohmann::json::array();
        bool any_invalid = false;
        for (const auto& src : inv.derived_from) {
            const CachedRead* read = rec.last_read_named(src);
            SegmentId src_seg;
            LogicalTime acquired = 0;
            if (read != nullptr) {
                src_seg = read->seg;
                acquired = read->at;
            } else if (const MemorySegment* own = rec.memory.find_named(src)) {
                src_seg = own->id;
                acquired = rec.spawned_at;
            } else {
                return fail_with("unknown-segment");
            }
            const ValidityVerdict v = revision_log_.validity(src_seg, acquired);
            sources.push_back({{"name", src},
                               {"seg", src_seg.value},
                               {"acquired_at", acquired},
                               {"validity", validity_name(v.state)},
                               {"validity_at", v.at}});
            if (!v.ok()) any_invalid = true;
        }
        if (!sources.empty()) detail["sources"] = sources;
        if (any_invalid && config_.mode == EnforcementMode::enforced) {
            detail["outcome"] = "blocked-stale";
            trace_.append({now, "tool", actor, detail});
            out.kind = InterceptOutcome::Kind::blocked_stale;
            out.error = "stale-source";
            return out;
        }
        if (any_invalid) {
            detail["stale_source"] = true;
        }

        MemoryStore& store = inv.own_store ? rec.memory : workspace_;
        MemorySegment* existing = store.find_named(inv.target);
        SegmentId seg_id;
        if (existing != nullptr) {
            existing->content = inv.content;
            seg_id = existing->id;
        } else {
            seg_id = allocate_segment_id();
            MemorySegment seg;
            seg.id = seg_id;
            seg.label = inv.label ? lattice_.require(*inv.label)
                                  : rec.role.clearance;
            seg.content = inv.content;
            seg.created_at = now;
            seg.name = inv.target;
            store.append(seg);
            segment_origin_[seg_id] =
                inv.own_store ? std::optional<AgentId>(actor) : std::nullopt;
        }
        revision_log_.append({RevisionOp::update, seg_id, now, actor});
        detail["outcome"] = "executed";
        detail["seg"] = seg_id.value;
        trace_.append({now, "tool", actor, detail});
        out.kind = InterceptOutcome::Kind::executed;
        out.result = inv.content;
        return out;
    }

    if (inv.tool == "fs_chmod") {
        MemorySegment* seg = workspace_.find_named(inv.target);
        if (seg == nullptr) {
            return fail_with("unknown-segment");
        }
        seg->executable = true;
        detail["outcome"] = "executed";
        detail["seg"] = seg->id.value;
        trace_.append({now, "tool", actor, detail});
        out.kind = InterceptOutcome::Kind::executed;
        return out;
    }

    if (inv.tool == "exec") {
        const MemorySegment* seg = workspace_.find_named(inv.target);
        if (seg == nullptr) {
            return fail_with("unknown-segment");
        }
        if (!seg->executable) {
            return fail_with("not-executable");
        }
        exec_log_.push_back(inv.target);
        detail["outcome"] = "executed";
        detail["result"] = "executed:" + inv.target;
        trace_.append({now, "tool", actor, detail});
        out.kind = InterceptOutcome::Kind::executed;
        out.result = "executed:" + inv.target;
        return out;
    }

    if (inv.tool == "autostart_register") {
        if (workspace_.find_named(inv.target) == nullptr) {
            return fail_with("unknown-segment");
        }
        persistence_.push_back(inv.target);
        detail["outcome"] = "executed";
        trace_.append({now, "tool", actor, detail});
        out.kind = InterceptOutcome::Kind::executed;
        return out;
    }

    if (inv.tool == "web_fetch") {
        detail["outcome"] = "executed";
        detail["result"] = "fetched:" + inv.target;
        trace_.append({now, "tool", actor, detail});
        out.kind = InterceptOutcome::Kind::executed;
        out.result = "fetched:" + inv.target;
        return out;
    }

    return fail_with("tool-not-implemented");
}

void Kernel::revoke_segment(AgentId author, SegmentId seg) {
    const LogicalTime now = tick();
    require_alive(author);
    auto it = segment_origin_.find(seg);
    if (it == segment_origin_.end()) {
        fail(Errc::unknown_segment,
             "unknown segment " + std::to_string(seg.value));
    }
    // Revocation is parent-controlled: the segment owner's parent or the
    // root. Workspace segments are root-administered.
    bool authorized = author == state_.root();
    if (!authorized && it->second.has_value()) {
        auto owner_parent = state_.parent_of(*it->second);
        authorized = owner_parent && *owner_parent == author;
    }
    if (!authorized) {
        fail(Errc::not_authorized_revoker,
             "agent " + std::to_string(author.value) +
                 " may not revoke segment " + std::to_string(seg.value));
    }
    revision_log_.append({RevisionOp::revoke, seg, now, author});
    nlohmann::json detail;
    detail["seg"] = seg.value;
    trace_.append({now, "revoke", author, std::move(detail)});
}

Kernel::MessageOutcome Kernel::deliver_message(AgentId from, AgentId to,
                                               const std::string& text) {
    const LogicalTime now = tick();
    require_alive(from);
    AgentRecord& recipient = state_.agent(to);

    nlohmann::json detail;
    detail["to"] = to.value;
    detail["text"] = text;

    MessageOutcome outcome;
    if (!recipient.alive) {
        detail["outcome"] = "undeliverable";
        detail["reason"] = "target-terminated";
        trace_.append({now, "message", from, std::move(detail)});
        return outcome;
    }

    const ActionRef action =
        ActionRef::structural({CapabilityKind::communicate, std::nullopt});
    if (config_.mode == EnforcementMode::enforced) {
        const PolicyDecision d = registry_.decide(from, action, state_);
        if (!d.permitted()) {
            detail["outcome"] = "denied";
            detail["reason"] = d.reason;
            trace_.append({now, "message", from, std::move(detail)});
            outcome.decision = d;
            return outcome;
        }
    } else {
        const PolicyDecision would = hypothetical_decision(from, action);
        if (!would.permitted()) {
            detail["would_deny"] = true;
            detail["would_reason"] = would.reason;
        }
    }

    outcome.delivered = true;
    nlohmann::json fired = nlohmann::json::array();
    for (const auto& seg : recipient.memory.segments()) {
        if (seg.trigger && text.find(seg.trigger->keyword) != std::string::npos) {
            outcome.fired.push_back(
                {seg.trigger->keyword, seg.trigger->tool, seg.trigger->target});
            fired.push_back({{"keyword", seg.trigger->keyword},
                             {"tool", seg.trigger->tool},
                             {"target", seg.trigger->target},
                             {"seg", seg.id.value}});
        }
    }
    detail["outcome"] = "delivered";
    detail["fired"] = fired;
    trace_.append({now, "message", from, std::move(detail)});
    return outcome;
}

void Kernel::note(const std::string& kind, AgentId actor,
                  nlohmann::json detail) {
    const LogicalTime now = tick();
    trace_.append({now, kind, actor, std::move(detail)});
}

std::set<AgentId> contamination_in(const NetworkState& network) {
    std::set<AgentId> reached;
    for (const auto& [id, rec] : network.agents()) {
        for (const auto& seg : rec.memory.segments()) {
            if (seg.adversarial) {
                reached.insert(id);
                break;
            }
        }
    }
    return reached;
}

std::set<AgentId> Kernel::contamination_reach() const {
    return contamination_in(state_);
}

std::uint64_t components_digest(const NetworkState& network,
                                const MemoryStore& workspace,
                                const CapabilityRegistry& registry,
                                const RevisionLog& log,
                                const std::vector<PendingTermination>& pending,
                                const std::vector<std::string>& exec_log,
                                const std::vector<std::string>& persistence) {
    std::uint64_t h = kFnvOffsetBasis;
    auto mix = [&h](const std::string& s) {
        h = fnv1a64(s, h);
        h = fnv1a64("\x1f", h);
    };
    mix("clock:" + std::to_string(network.clock()));
    mix("root:" + std::to_string(network.root().value));
    for (const auto& [id, rec] : network.agents()) {
        mix("agent:" + std::to_string(id.value));
        mix(rec.name);
        mix(rec.role.name);
        mix(std::to_string(rec.role.clearance.rank));
        for (const auto& cap : rec.capabilities.entries()) {
            mix("cap:" + capability_text(cap));
        }
        mix(rec.alive ? "alive" : "dead");
        mix(rec.parent ? "parent:" + std::to_string(rec.parent->value)
                       : "parent:-");
        mix(std::string("mode:") + memory_mode_name(rec.declared_mode));
        if (rec.declared_selector) {
            for (SegmentId s : *rec.declared_selector) {
                mix("sel:" + std::to_string(s.value));
            }
        }
        mix("spawned:" + std::to_string(rec.spawned_at));
        mix("store:" + hex64(store_digest(rec.memory)));
        mix(std::string("life:") + lifespan_name(rec.lifespan));
        mix(std::string("inter:") + interaction_name(rec.interaction));
        for (const auto& r : rec.reads) {
            mix("read:" + std::to_string(r.seg.value) + ":" + r.name + ":" +
                r.content + ":" + std::to_string(r.at) + ":" +
                (r.from_workspace ? "ws" : "own"));
        }
    }
    for (const auto& [p, c] : network.edges()) {
        mix("edge:" + std::to_string(p.value) + ">" + std::to_string(c.value));
    }
    mix("workspace:" + hex64(store_digest(workspace)));
    for (const auto& [id, entry] : registry.entries()) {
        mix("reg:" + std::to_string(id.value) + ":" +
            hex64(entry_digest(entry)));
    }
    mix("rlog:" + hex64(log_digest(log)));
    for (const auto& p : pending) {
        mix("pend:" + std::to_string(p.id) + ":" +
            std::to_string(p.actor.value) + ":" +
            std::to_string(p.target.value) + ":" +
            std::to_string(p.approver.value) + ":" +
            std::to_string(p.requested_at));
    }
    for (const auto& e : exec_log) mix("exec:" + e);
    for (const auto& e : persistence) mix("persist:" + e);
    return h;
}

std::uint64_t Kernel::state_digest() const {
    return components_digest(state_, workspace_, registry_, revision_log_,
                             pending_, exec_log_, persistence_);
}

}  // namespace masim
