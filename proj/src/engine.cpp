#include "masim/engine.hpp"

#include <algorithm>

#include "masim/errors.hpp"
#include "masim/hash.hpp"
#include "masim/invariants.hpp"

namespace masim {

namespace {

CapabilitySet parse_capability_list(const std::vector<std::string>& names,
                                    const std::map<std::string, AgentId>& by_name) {
    CapabilitySet out;
    for (const auto& text : names) {
        if (text.rfind("kill:", 0) == 0) {
            const std::string target_name = text.substr(5);
            auto it = by_name.find(target_name);
            if (it == by_name.end()) {
                fail(Errc::scenario_invalid,
                     "kill target '" + target_name + "' not yet spawned");
            }
            out.add(Capability{CapabilityKind::kill, it->second});
            continue;
        }
        auto kind = parse_capability_kind(text);
        if (!kind) {
            fail(Errc::scenario_invalid, "unknown capability '" + text + "'");
        }
        out.add(*kind);
    }
    return out;
}

}  // namespace

Scheduler::Scheduler(const Scenario& scenario, Kernel& kernel,
                     std::uint64_t seed)
    : scenario_(scenario),
      kernel_(kernel),
      schedule_(scenario.schedule),
      seeded_fallback_(scenario.schedule_fallback == "seeded"),
      rng_(seed) {}

void Scheduler::attach_agent(AgentId id, const std::string& name) {
    AgentQueue q;
    q.id = id;
    q.name = name;
    auto it = scenario_.behaviors.find(name);
    if (it != scenario_.behaviors.end()) {
        for (const auto& step : it->second.steps) {
            if (step.kind == StepSpec::Kind::work && step.repeat > 1) {
                StepSpec single = step;
                single.repeat = 1;
                for (int i = 0; i < step.repeat; ++i) {
                    q.steps.push_back(single);
                }
            } else {
                q.steps.push_back(step);
            }
        }
        q.triggers = it->second.on_keyword;
    }
    by_name_[name] = id;
    queues_.push_back(std::move(q));
}

Scheduler::AgentQueue* Scheduler::queue_for(AgentId id) {
    for (auto& q : queues_) {
        if (q.id == id) return &q;
    }
    return nullptr;
}

Scheduler::AgentQueue* Scheduler::queue_named(const std::string& name) {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return nullptr;
    return queue_for(it->second);
}

AgentId Scheduler::resolve_agent(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) {
        fail(Errc::scenario_invalid, "unknown agent '" + name + "'");
    }
    return it->second;
}

bool Scheduler::runnable(const AgentQueue& q) const {
    return !q.steps.empty() && kernel_.state().exists(q.id) &&
           kernel_.state().agent(q.id).alive;
}

bool Scheduler::has_runnable() const {
    return std::any_of(queues_.begin(), queues_.end(),
                       [this](const AgentQueue& q) { return runnable(q); });
}

Scheduler::AgentQueue* Scheduler::pick_next() {
    // Explicit sequence first: entries naming a non-runnable agent are
    // consumed silently, which keeps schedules deterministic even when a
    // named agent died or finished early.
    while (schedule_pos_ < schedule_.size()) {
        const std::string& name = schedule_[schedule_pos_];
        ++schedule_pos_;
        AgentQueue* q = queue_named(name);
        if (q != nullptr && runnable(*q)) {
            return q;
        }
    }
    std::vector<AgentQueue*> ready;
    for (auto& q : queues_) {
        if (runnable(q)) ready.push_back(&q);
    }
    if (ready.empty()) return nullptr;
    if (seeded_fallback_) {
        return ready[static_cast<std::size_t>(rng_() % ready.size())];
    }
    // Round-robin over spawn order: every runnable agent is stepped within
    // one full rotation.
    for (std::size_t probe = 0; probe < queues_.size(); ++probe) {
        AgentQueue& q = queues_[(rotation_pos_ + probe) % queues_.size()];
        if (runnable(q)) {
            rotation_pos_ =
                (rotation_pos_ + probe + 1) % std::max<std::size_t>(1, queues_.size());
            return &q;
        }
    }
    return nullptr;
}

std::string Scheduler::peek_next() const {
    std::size_t pos = schedule_pos_;
    while (pos < schedule_.size()) {
        const std::string& name = schedule_[pos];
        ++pos;
        auto it = by_name_.find(name);
        if (it == by_name_.end()) continue;
        for (const auto& q : queues_) {
            if (q.id == it->second && runnable(q)) return q.name;
        }
    }
    for (std::size_t probe = 0; probe < queues_.size(); ++probe) {
        const AgentQueue& q = queues_[(rotation_pos_ + probe) % queues_.size()];
        if (runnable(q)) return q.name;
    }
    return "";
}

void Scheduler::step() {
    AgentQueue* q = pick_next();
    if (q == nullptr) {
        fail(Errc::no_runnable_step, "no runnable step");
    }
    StepSpec step = q->steps.front();
    q->steps.pop_front();
    ++steps_applied_;
    execute(*q, step);
}

void Scheduler::execute(AgentQueue& q, const StepSpec& step) {
    const AgentId actor = q.id;
    try {
        switch (step.kind) {
            case StepSpec::Kind::spawn: {
                SpawnSpec spec;
                spec.name = step.child;
                const RoleSpec& role = scenario_.roles.at(step.role);
                spec.role = Role{step.role,
                                 kernel_.lattice().require(role.clearance)};
                spec.capabilities = parse_capability_list(step.capabilities,
                                                          by_name_);
                auto mode = parse_memory_mode(step.memory_mode);
                spec.memory_mode = mode.value_or(MemoryMode::agent_agnostic);
                if (step.selector) {
                    const AgentRecord& parent = kernel_.state().agent(actor);
                    std::vector<SegmentId> ids;
                    for (const auto& name : *step.selector) {
                        const MemorySegment* seg =
                            parent.memory.find_named(name);
                        if (seg == nullptr) {
                            fail(Errc::bad_selector,
                                 "selector references unknown segment '" +
                                     name + "'");
                        }
                        ids.push_back(seg->id);
                    }
                    spec.selector = std::move(ids);
                }
                spec.lifespan =
                    parse_lifespan(step.lifespan).value_or(Lifespan::one_time);
                spec.interaction = parse_interaction(step.interaction)
                                       .value_or(Interaction::task_oriented);
                AgentId child = kernel_.spawn(actor, spec);
                attach_agent(child, step.child);
                break;
            }
            case StepSpec::Kind::inject: {
                SensitivityLabel label =
                    step.label.empty()
                        ? kernel_.state().agent(actor).role.clearance
                        : kernel_.lattice().require(step.label);
                std::optional<SegmentTrigger> trigger;
                if (step.trigger) {
                    trigger = SegmentTrigger{step.trigger->keyword,
                                             step.trigger->tool,
                                             step.trigger->target};
                }
                kernel_.inject(actor, step.content, label, trigger,
                               step.segment);
                break;
            }
            case StepSpec::Kind::invoke: {
                ToolInvocation inv;
                inv.tool = step.tool;
                inv.target = step.target;
                kernel_.invoke_tool(actor, inv);
                break;
            }
            case StepSpec::Kind::read: {
                ToolInvocation inv;
                inv.tool = "read_segment";
                inv.target = step.segment;
                inv.own_store = step.own_store;
                kernel_.invoke_tool(actor, inv);
                break;
            }
            case StepSpec::Kind::write: {
                if (step.if_cached_equals) {
                    const AgentRecord& rec = kernel_.state().agent(actor);
                    const CachedRead* read =
                        rec.last_read_named(step.if_cached_equals->segment);
                    if (read == nullptr ||
                        read->content != step.if_cached_equals->value) {
                        kernel_.note(
                            "skip", actor,
                            {{"step", "write"},
                             {"segment", step.segment},
                             {"condition", step.if_cached_equals->segment},
                             {"expected", step.if_cached_equals->value},
                             {"cached",
                              read ? nlohmann::json(read->content)
                                   : nlohmann::json(nullptr)}});
                        break;
                    }
                }
                ToolInvocation inv;
                inv.tool = "write_segment";
                inv.target = step.segment;
                inv.content = step.content;
                if (!step.label.empty()) inv.label = step.label;
                inv.derived_from = step.derived_from;
                inv.own_store = step.own_store;
                kernel_.invoke_tool(actor, inv);
                break;
            }
            case StepSpec::Kind::request_terminate: {
                AgentId target = resolve_agent(step.target_agent);
                kernel_.terminate_agent(actor, target);
                break;
            }
            case StepSpec::Kind::resolve_terminations: {
                std::vector<std::uint64_t> mine;
                for (const auto& p : kernel_.pending_terminations()) {
                    if (p.approver == actor) mine.push_back(p.id);
                }
                if (mine.empty()) {
                    kernel_.note("resolve", actor, {{"resolved", 0}});
                    break;
                }
                for (std::uint64_t id : mine) {
                    kernel_.resolve_pending_termination(actor, id,
                                                        step.approve);
                }
                break;
            }
            case StepSpec::Kind::message: {
                AgentId to = resolve_agent(step.target_agent);
                auto outcome = kernel_.deliver_message(actor, to, step.text);
                if (outcome.delivered) {
                    AgentQueue* target_q = queue_for(to);
                    // Segment-carried rules fire first, then scripted
                    // keyword handlers; both run as the recipient's next
                    // steps in declaration order.
                    std::vector<StepSpec> fired;
                    for (const auto& f : outcome.fired) {
                        StepSpec s;
                        s.kind = StepSpec::Kind::invoke;
                        s.tool = f.tool;
                        s.target = f.target;
                        fired.push_back(std::move(s));
                    }
                    if (target_q != nullptr) {
                        for (const auto& bt : target_q->triggers) {
                            if (step.text.find(bt.keyword) !=
                                std::string::npos) {
                                fired.push_back(bt.respond);
                            }
                        }
                        for (auto it = fired.rbegin(); it != fired.rend();
                             ++it) {
                            target_q->steps.push_front(*it);
                        }
                    }
                }
                break;
            }
            case StepSpec::Kind::work:
                kernel_.note("work", actor, {{"note", step.note}});
                break;
            case StepSpec::Kind::revoke: {
                const MemorySegment* seg =
                    kernel_.workspace().find_named(step.segment);
                if (seg == nullptr) {
                    seg = kernel_.state().agent(actor).memory.find_named(
                        step.segment);
                }
                if (seg == nullptr) {
                    fail(Errc::unknown_segment,
                         "unknown segment '" + step.segment + "'");
                }
                kernel_.revoke_segment(actor, seg->id);
                break;
            }
        }
    } catch (const KernelError& err) {
        kernel_.note("error", actor,
                     {{"error", errc_name(err.code())},
                      {"message", err.what()},
                      {"step", step_kind_name(step.kind)}});
    }
}

void Scheduler::run_to_completion() {
    while (has_runnable()) {
        step();
    }
    if (!kernel_.pending_terminations().empty()) {
        fail(Errc::deadlock_detected,
             "scripts exhausted with " +
                 std::to_string(kernel_.pending_terminations().size()) +
                 " unresolved pending termination(s) and no approver step");
    }
}

std::vector<DefenseEvent> extract_defenses(const Trace& trace) {
    std::vector<DefenseEvent> out;
    for (const auto& ev : trace.events) {
        if (!ev.actor) continue;
        const std::string outcome = ev.detail.value("outcome", "");
        if (ev.kind == "tool" && outcome == "denied") {
            out.push_back({"denial", *ev.actor, ev.t, ev.detail});
        } else if (ev.kind == "terminate" && outcome == "denied") {
            out.push_back({"denial", *ev.actor, ev.t, ev.detail});
        } else if (ev.kind == "message" && outcome == "denied") {
            out.push_back({"denial", *ev.actor, ev.t, ev.detail});
        } else if (ev.kind == "terminate" && outcome == "suspended") {
            out.push_back({"suspension", *ev.actor, ev.t, ev.detail});
        } else if (ev.kind == "tool" && outcome == "blocked-stale") {
            out.push_back({"stale-commit-blocked", *ev.actor, ev.t, ev.detail});
        } else if (ev.kind == "spawn" &&
                   !ev.detail.value("excluded", nlohmann::json::array())
                        .empty()) {
            out.push_back({"projection-excluded", *ev.actor, ev.t, ev.detail});
        }
    }
    return out;
}

nlohmann::json run_stats(const Trace& trace, const Kernel& kernel) {
    nlohmann::json stats;
    std::map<std::string, int> executed_by_agent;
    std::map<std::string, int> work_counts;
    int denied = 0;
    int would_deny = 0;
    for (const auto& ev : trace.events) {
        const std::string outcome = ev.detail.value("outcome", "");
        std::string actor_name;
        if (ev.actor && kernel.state().exists(*ev.actor)) {
            actor_name = kernel.state().agent(*ev.actor).name;
        }
        if (ev.kind == "tool" && outcome == "executed") {
            executed_by_agent[actor_name] += 1;
        }
        if (outcome == "denied") ++denied;
        if (ev.detail.value("would_deny", false)) ++would_deny;
        if (ev.kind == "work") {
            work_counts[actor_name] += 1;
        }
    }
    stats["executed_tools"] = executed_by_agent;
    stats["denied"] = denied;
    stats["would_deny"] = would_deny;
    stats["work_counts"] = work_counts;
    nlohmann::json workspace = nlohmann::json::object();
    for (const auto& seg : kernel.workspace().segments()) {
        if (seg.name) workspace[*seg.name] = seg.content;
    }
    stats["workspace"] = workspace;
    stats["exec_log"] = kernel.exec_log();
    stats["persistence"] = kernel.persistence_list();
    nlohmann::json executables = nlohmann::json::array();
    for (const auto& seg : kernel.workspace().segments()) {
        if (seg.executable && seg.name) executables.push_back(*seg.name);
    }
    stats["executable_flags"] = executables;
    return stats;
}

bool outcomes_match(const Report& report, const Scenario& scenario,
                    EnforcementMode mode) {
    auto it = scenario.expected.find(enforcement_mode_name(mode));
    if (it == scenario.expected.end()) {
        return true;  // nothing declared, nothing to contradict
    }
    const ExpectedOutcome& expected = it->second;
    const auto violations = report.violation_counts();
    for (const auto& [kind, count] : expected.violations) {
        auto found = violations.find(kind);
        const int observed = found == violations.end() ? 0 : found->second;
        if (observed != count) return false;
    }
    for (const auto& [kind, count] : violations) {
        (void)count;
        if (!expected.violations.contains(kind)) return false;
    }
    const auto defenses = report.defense_counts();
    for (const auto& [kind, count] : expected.defenses) {
        auto found = defenses.find(kind);
        const int observed = found == defenses.end() ? 0 : found->second;
        if (observed < count) return false;
    }
    return true;
}

nlohmann::json summary_json(const Report& report,
                            const std::set<AgentId>& contamination,
                            const std::string& state_digest_hex) {
    nlohmann::json summary;
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : report.violations) violations.push_back(v.to_json());
    summary["violations"] = violations;
    nlohmann::json defenses = nlohmann::json::array();
    for (const auto& d : report.defenses) defenses.push_back(d.to_json());
    summary["defenses"] = defenses;
    nlohmann::json contamination_json = nlohmann::json::array();
    for (AgentId id : contamination) {
        contamination_json.push_back(id.value);
    }
    summary["contamination"] = contamination_json;
    summary["state_digest"] = state_digest_hex;
    summary["informational"] = report.informational;
    return summary;
}

RunResult Engine::run(const Scenario& scenario, EnforcementMode mode,
                      std::uint64_t seed) const {
    scenario.validate();

    SensitivityLattice lattice = scenario.lattice.empty()
                                     ? SensitivityLattice()
                                     : SensitivityLattice(scenario.lattice);
    RoleResourceMap role_map;
    for (const auto& [name, role] : scenario.roles) {
        role_map.declare(name, role.tools);
    }
    KernelConfig config;
    config.mode = mode;
    config.flat_deny_sibling_termination =
        scenario.flat_deny_sibling_termination;

    auto kernel = std::make_shared<Kernel>(config, lattice, role_map,
                                           scenario.tools);

    TraceMeta meta;
    meta.scenario = scenario.name;
    meta.mode = enforcement_mode_name(mode);
    meta.seed = seed;
    meta.lattice = lattice.levels();
    meta.tools = scenario.tools;
    nlohmann::json roles_json = nlohmann::json::object();
    for (const auto& [name, role] : scenario.roles) {
        roles_json[name] = {{"clearance", role.clearance},
                            {"tools", role.tools}};
    }
    meta.roles = roles_json;
    meta.config = {{"flat_deny_sibling_termination",
                    scenario.flat_deny_sibling_termination},
                   {"schedule_fallback", scenario.schedule_fallback}};
    kernel->trace().meta = meta;

    const InitialAgent& root_decl = scenario.root();
    RootSpec root;
    root.name = root_decl.name;
    const RoleSpec& root_role = scenario.roles.at(root_decl.role);
    root.role = Role{root_decl.role, lattice.require(root_role.clearance)};
    root.capabilities = parse_capability_list(root_decl.capabilities, {});
    root.interaction = parse_interaction(root_decl.interaction)
                           .value_or(Interaction::session_based);
    AgentId root_id = kernel->bootstrap_root(root);

    for (const auto& w : scenario.workspace) {
        SensitivityLabel label = w.label.empty()
                                     ? lattice.bottom()
                                     : lattice.require(w.label);
        kernel->init_workspace_segment(w.name, w.content, label);
    }

    Scheduler scheduler(scenario, *kernel, seed);
    scheduler.attach_agent(root_id, root_decl.name);

    // Initial non-root agents spawn during setup, in declaration order.
    std::map<std::string, AgentId> initial_ids{{root_decl.name, root_id}};
    for (std::size_t i = 1; i < scenario.agents.size(); ++i) {
        const InitialAgent& ia = scenario.agents[i];
        SpawnSpec spec;
        spec.name = ia.name;
        const RoleSpec& role = scenario.roles.at(ia.role);
        spec.role = Role{ia.role, lattice.require(role.clearance)};
        spec.capabilities = parse_capability_list(ia.capabilities, initial_ids);
        spec.memory_mode =
            parse_memory_mode(ia.memory_mode).value_or(MemoryMode::agent_agnostic);
        spec.lifespan = parse_lifespan(ia.lifespan).value_or(Lifespan::one_time);
        spec.interaction = parse_interaction(ia.interaction)
                               .value_or(Interaction::task_oriented);
        AgentId id = kernel->spawn(initial_ids.at(ia.parent), spec);
        initial_ids[ia.name] = id;
        scheduler.attach_agent(id, ia.name);
    }

    scheduler.run_to_completion();

    Report report;
    report.scenario = scenario.name;
    report.mode = enforcement_mode_name(mode);
    report.seed = seed;
    report.violations =
        check_all(kernel->trace(), kernel->state(), kernel->workspace(),
                  kernel->revision_log(), kernel->role_map());
    report.defenses = extract_defenses(kernel->trace());
    report.informational =
        stale_view_report(kernel->state(), kernel->workspace());
    report.stats = run_stats(kernel->trace(), *kernel);
    report.trace_hash = kernel->trace().hash_hex();
    report.expected_match = outcomes_match(report, scenario, mode);

    RunResult result;
    result.trace = kernel->trace();
    result.ndjson = kernel->trace().to_ndjson(
        summary_json(report, kernel->contamination_reach(),
                     hex64(kernel->state_digest())));
    result.report = std::move(report);
    result.kernel = kernel;
    return result;
}

}  // namespace masim
