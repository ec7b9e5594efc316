#include "masim/scenario.hpp"

#include <fstream>
#include <sstream>

#include "masim/capability.hpp"
#include "masim/errors.hpp"
#include "masim/network.hpp"
#include "masim/sensitivity.hpp"

namespace masim {

namespace {

[[noreturn]] void bad(const std::string& at, const std::string& what) {
    fail(Errc::scenario_invalid, at + ": " + what);
}

const nlohmann::json& need(const nlohmann::json& j, const char* key,
                           const std::string& at) {
    if (!j.is_object() || !j.contains(key)) {
        bad(at, std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

std::string need_string(const nlohmann::json& j, const char* key,
                        const std::string& at) {
    const auto& v = need(j, key, at);
    if (!v.is_string()) bad(at + "." + key, "expected a string");
    return v.get<std::string>();
}

std::string opt_string(const nlohmann::json& j, const char* key,
                       const std::string& fallback) {
    if (j.is_object() && j.contains(key) && j.at(key).is_string()) {
        return j.at(key).get<std::string>();
    }
    return fallback;
}

}  // namespace

const char* step_kind_name(StepSpec::Kind kind) noexcept {
    switch (kind) {
        case StepSpec::Kind::spawn: return "spawn";
        case StepSpec::Kind::inject: return "inject";
        case StepSpec::Kind::invoke: return "invoke";
        case StepSpec::Kind::read: return "read";
        case StepSpec::Kind::write: return "write";
        case StepSpec::Kind::request_terminate: return "request-terminate";
        case StepSpec::Kind::resolve_terminations: return "resolve-terminations";
        case StepSpec::Kind::message: return "message";
        case StepSpec::Kind::work: return "work";
        case StepSpec::Kind::revoke: return "revoke";
    }
    return "unknown";
}

namespace {

std::optional<StepSpec::Kind> parse_step_kind(const std::string& text) {
    if (text == "spawn") return StepSpec::Kind::spawn;
    if (text == "inject") return StepSpec::Kind::inject;
    if (text == "invoke") return StepSpec::Kind::invoke;
    if (text == "read") return StepSpec::Kind::read;
    if (text == "write") return StepSpec::Kind::write;
    if (text == "request-terminate") return StepSpec::Kind::request_terminate;
    if (text == "resolve-terminations")
        return StepSpec::Kind::resolve_terminations;
    if (text == "message") return StepSpec::Kind::message;
    if (text == "work") return StepSpec::Kind::work;
    if (text == "revoke") return StepSpec::Kind::revoke;
    return std::nullopt;
}

TriggerSpec parse_trigger(const nlohmann::json& j, const std::string& at) {
    TriggerSpec t;
    t.keyword = need_string(j, "keyword", at);
    t.tool = need_string(j, "tool", at);
    t.target = need_string(j, "target", at);
    return t;
}

}  // namespace

nlohmann::json StepSpec::to_json() const {
    nlohmann::json j;
    j["action"] = step_kind_name(kind);
    switch (kind) {
        case Kind::spawn:
            j["child"] = child;
            j["role"] = role;
            j["capabilities"] = capabilities;
            j["memory_mode"] = memory_mode;
            if (selector) j["selector"] = *selector;
            j["lifespan"] = lifespan;
            j["interaction"] = interaction;
            break;
        case Kind::inject:
            j["segment"] = segment;
            j["content"] = content;
            if (!label.empty()) j["label"] = label;
            if (trigger) {
                j["trigger"] = {{"keyword", trigger->keyword},
                                {"tool", trigger->tool},
                                {"target", trigger->target}};
            }
            break;
        case Kind::invoke:
            j["tool"] = tool;
            j["target"] = target;
            break;
        case Kind::read:
            j["segment"] = segment;
            if (own_store) j["own_store"] = true;
            break;
        case Kind::write:
            j["segment"] = segment;
            j["content"] = content;
            if (!label.empty()) j["label"] = label;
            if (!derived_from.empty()) j["derived_from"] = derived_from;
            if (own_store) j["own_store"] = true;
            if (if_cached_equals) {
                j["if_cached_equals"] = {{"segment", if_cached_equals->segment},
                                         {"value", if_cached_equals->value}};
            }
            break;
        case Kind::request_terminate:
            j["target"] = target_agent;
            break;
        case Kind::resolve_terminations:
            j["approve"] = approve;
            break;
        case Kind::message:
            j["to"] = target_agent;
            j["text"] = text;
            break;
        case Kind::work:
            j["note"] = note;
            if (repeat != 1) j["repeat"] = repeat;
            break;
        case Kind::revoke:
            j["segment"] = segment;
            break;
    }
    return j;
}

StepSpec StepSpec::from_json(const nlohmann::json& j, const std::string& at) {
    StepSpec s;
    const std::string action = need_string(j, "action", at);
    auto kind = parse_step_kind(action);
    if (!kind) bad(at + ".action", "unknown action '" + action + "'");
    s.kind = *kind;
    switch (s.kind) {
        case Kind::spawn:
            s.child = need_string(j, "child", at);
            s.role = need_string(j, "role", at);
            if (j.contains("capabilities")) {
                if (!j["capabilities"].is_array()) {
                    bad(at + ".capabilities", "expected an array");
                }
                for (const auto& c : j["capabilities"]) {
                    s.capabilities.push_back(c.get<std::string>());
                }
            }
            s.memory_mode = opt_string(j, "memory_mode", "agent-agnostic");
            if (j.contains("selector")) {
                std::vector<std::string> names;
                for (const auto& n : j["selector"]) {
                    names.push_back(n.get<std::string>());
                }
                s.selector = std::move(names);
            }
            s.lifespan = opt_string(j, "lifespan", "one-time");
            s.interaction = opt_string(j, "interaction", "task-oriented");
            break;
        case Kind::inject:
            s.segment = need_string(j, "segment", at);
            s.content = need_string(j, "content", at);
            s.label = opt_string(j, "label", "");
            if (j.contains("trigger")) {
                s.trigger = parse_trigger(j["trigger"], at + ".trigger");
            }
            break;
        case Kind::invoke:
            s.tool = need_string(j, "tool", at);
            s.target = opt_string(j, "target", "");
            break;
        case Kind::read:
            s.segment = need_string(j, "segment", at);
            s.own_store = j.value("own_store", false);
            break;
        case Kind::write:
            s.segment = need_string(j, "segment", at);
            s.content = need_string(j, "content", at);
            s.label = opt_string(j, "label", "");
            if (j.contains("derived_from")) {
                for (const auto& d : j["derived_from"]) {
                    s.derived_from.push_back(d.get<std::string>());
                }
            }
            s.own_store = j.value("own_store", false);
            if (j.contains("if_cached_equals")) {
                const auto& c = j["if_cached_equals"];
                s.if_cached_equals = IfCached{
                    need_string(c, "segment", at + ".if_cached_equals"),
                    need_string(c, "value", at + ".if_cached_equals")};
            }
            break;
        case Kind::request_terminate:
            s.target_agent = need_string(j, "target", at);
            break;
        case Kind::resolve_terminations:
            s.approve = j.value("approve", false);
            break;
        case Kind::message:
            s.target_agent = need_string(j, "to", at);
            s.text = need_string(j, "text", at);
            break;
        case Kind::work:
            s.note = opt_string(j, "note", "work");
            s.repeat = j.value("repeat", 1);
            if (s.repeat < 1) bad(at + ".repeat", "must be >= 1");
            break;
        case Kind::revoke:
            s.segment = need_string(j, "segment", at);
            break;
    }
    return s;
}

InitialAgent& Scenario::root() {
    if (agents.empty()) {
        agents.push_back({});
    }
    return agents.front();
}

const InitialAgent& Scenario::root() const {
    if (agents.empty()) {
        bad("scenario.agents", "no initial agents declared");
    }
    return agents.front();
}

Scenario Scenario::from_json(const nlohmann::json& j) {
    Scenario sc;
    sc.name = need_string(j, "scenario", "scenario");
    sc.description = opt_string(j, "description", "");
    if (j.contains("lattice")) {
        for (const auto& l : j["lattice"]) {
            sc.lattice.push_back(l.get<std::string>());
        }
    }
    for (const auto& t : need(j, "tools", "scenario")) {
        sc.tools.insert(t.get<std::string>());
    }
    const auto& roles = need(j, "roles", "scenario");
    if (!roles.is_object()) bad("scenario.roles", "expected an object");
    for (const auto& [name, body] : roles.items()) {
        RoleSpec spec;
        spec.clearance = need_string(body, "clearance", "scenario.roles." + name);
        for (const auto& t : need(body, "tools", "scenario.roles." + name)) {
            spec.tools.insert(t.get<std::string>());
        }
        sc.roles[name] = std::move(spec);
    }
    const auto& agents = need(j, "agents", "scenario");
    if (!agents.is_array() || agents.empty()) {
        bad("scenario.agents", "expected a non-empty array");
    }
    std::size_t agent_idx = 0;
    for (const auto& body : agents) {
        const std::string at = "scenario.agents[" +
                               std::to_string(agent_idx) + "]";
        InitialAgent ia;
        ia.name = opt_string(body, "name", agent_idx == 0 ? "main" : "");
        if (ia.name.empty()) bad(at, "missing field 'name'");
        ia.role = need_string(body, "role", at);
        for (const auto& c : need(body, "capabilities", at)) {
            ia.capabilities.push_back(c.get<std::string>());
        }
        ia.parent = opt_string(body, "parent", "");
        ia.memory_mode = opt_string(body, "memory_mode", "agent-agnostic");
        ia.lifespan = opt_string(body, "lifespan",
                                 agent_idx == 0 ? "persistent" : "one-time");
        ia.interaction = opt_string(
            body, "interaction",
            agent_idx == 0 ? "session-based" : "task-oriented");
        sc.agents.push_back(std::move(ia));
        ++agent_idx;
    }
    if (j.contains("workspace")) {
        for (const auto& w : j["workspace"]) {
            WorkspaceInit init;
            init.name = need_string(w, "name", "scenario.workspace");
            init.content = need_string(w, "content", "scenario.workspace");
            init.label = opt_string(w, "label", "");
            sc.workspace.push_back(std::move(init));
        }
    }
    const auto& behaviors = need(j, "behaviors", "scenario");
    if (!behaviors.is_object()) bad("scenario.behaviors", "expected an object");
    for (const auto& [name, body] : behaviors.items()) {
        AgentBehavior behavior;
        const std::string at = "scenario.behaviors." + name;
        const nlohmann::json* steps = &body;
        if (body.is_object()) {
            if (body.contains("steps")) steps = &body.at("steps");
            if (body.contains("on_keyword")) {
                for (const auto& t : body.at("on_keyword")) {
                    BehaviorTrigger bt;
                    bt.keyword = need_string(t, "keyword", at + ".on_keyword");
                    bt.respond = StepSpec::from_json(
                        need(t, "respond", at + ".on_keyword"),
                        at + ".on_keyword.respond");
                    behavior.on_keyword.push_back(std::move(bt));
                }
            }
        }
        if (!steps->is_array()) bad(at, "expected an array of steps");
        std::size_t idx = 0;
        for (const auto& step : *steps) {
            behavior.steps.push_back(
                StepSpec::from_json(step, at + "[" + std::to_string(idx) + "]"));
            ++idx;
        }
        sc.behaviors[name] = std::move(behavior);
    }
    if (j.contains("schedule")) {
        const auto& sched = j["schedule"];
        if (sched.is_array()) {
            for (const auto& s : sched) {
                sc.schedule.push_back(s.get<std::string>());
            }
        } else if (sched.is_object()) {
            if (sched.contains("sequence")) {
                for (const auto& s : sched["sequence"]) {
                    sc.schedule.push_back(s.get<std::string>());
                }
            }
            sc.schedule_fallback =
                opt_string(sched, "fallback", "round-robin");
        } else {
            bad("scenario.schedule", "expected an array or an object");
        }
    }
    if (sc.schedule_fallback != "round-robin" &&
        sc.schedule_fallback != "seeded") {
        bad("scenario.schedule.fallback",
            "expected 'round-robin' or 'seeded'");
    }
    if (j.contains("expected")) {
        for (const auto& [mode, body] : j["expected"].items()) {
            ExpectedOutcome expected;
            if (body.contains("violations")) {
                for (const auto& [kind, count] : body["violations"].items()) {
                    expected.violations[kind] = count.get<int>();
                }
            }
            if (body.contains("defenses")) {
                for (const auto& [kind, count] : body["defenses"].items()) {
                    expected.defenses[kind] = count.get<int>();
                }
            }
            sc.expected[mode] = std::move(expected);
        }
    }
    if (j.contains("config")) {
        sc.flat_deny_sibling_termination =
            j["config"].value("flat_deny_sibling_termination", false);
    }
    return sc;
}

Scenario Scenario::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail(Errc::scenario_invalid, "cannot open scenario file: " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json j = nlohmann::json::parse(buf.str(), nullptr, false);
    if (j.is_discarded()) {
        fail(Errc::scenario_invalid, path + ": not valid JSON");
    }
    return from_json(j);
}

nlohmann::json Scenario::to_json() const {
    nlohmann::json j;
    j["scenario"] = name;
    if (!description.empty()) j["description"] = description;
    if (!lattice.empty()) j["lattice"] = lattice;
    j["tools"] = tools;
    nlohmann::json roles_json = nlohmann::json::object();
    for (const auto& [rname, spec] : roles) {
        roles_json[rname] = {{"clearance", spec.clearance},
                             {"tools", spec.tools}};
    }
    j["roles"] = roles_json;
    nlohmann::json agents_json = nlohmann::json::array();
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const InitialAgent& ia = agents[i];
        nlohmann::json aj = {{"name", ia.name},
                             {"role", ia.role},
                             {"capabilities", ia.capabilities},
                             {"lifespan", ia.lifespan},
                             {"interaction", ia.interaction}};
        if (i > 0) {
            aj["parent"] = ia.parent;
            aj["memory_mode"] = ia.memory_mode;
        }
        agents_json.push_back(std::move(aj));
    }
    j["agents"] = agents_json;
    if (!workspace.empty()) {
        nlohmann::json ws = nlohmann::json::array();
        for (const auto& w : workspace) {
            nlohmann::json wj = {{"name", w.name}, {"content", w.content}};
            if (!w.label.empty()) wj["label"] = w.label;
            ws.push_back(wj);
        }
        j["workspace"] = ws;
    }
    nlohmann::json behaviors_json = nlohmann::json::object();
    for (const auto& [bname, behavior] : behaviors) {
        nlohmann::json steps = nlohmann::json::array();
        for (const auto& step : behavior.steps) {
            steps.push_back(step.to_json());
        }
        if (behavior.on_keyword.empty()) {
            behaviors_json[bname] = steps;
        } else {
            nlohmann::json triggers = nlohmann::json::array();
            for (const auto& t : behavior.on_keyword) {
                triggers.push_back({{"keyword", t.keyword},
                                    {"respond", t.respond.to_json()}});
            }
            behaviors_json[bname] = {{"steps", steps},
                                     {"on_keyword", triggers}};
        }
    }
    j["behaviors"] = behaviors_json;
    if (!schedule.empty() || schedule_fallback != "round-robin") {
        j["schedule"] = {{"sequence", schedule},
                         {"fallback", schedule_fallback}};
    }
    if (!expected.empty()) {
        nlohmann::json exp = nlohmann::json::object();
        for (const auto& [mode, outcome] : expected) {
            exp[mode] = {{"violations", outcome.violations},
                         {"defenses", outcome.defenses}};
        }
        j["expected"] = exp;
    }
    if (flat_deny_sibling_termination) {
        j["config"] = {{"flat_deny_sibling_termination", true}};
    }
    return j;
}

void Scenario::validate() const {
    SensitivityLattice lat =
        lattice.empty() ? SensitivityLattice() : SensitivityLattice(lattice);
    for (const auto& [rname, spec] : roles) {
        if (!lat.find(spec.clearance)) {
            bad("scenario.roles." + rname + ".clearance",
                "unknown level '" + spec.clearance + "'");
        }
        for (const auto& tool : spec.tools) {
            if (!tools.contains(tool)) {
                bad("scenario.roles." + rname + ".tools",
                    "tool '" + tool + "' not in the declared universe");
            }
        }
    }
    if (agents.empty()) {
        bad("scenario.agents", "no initial agents declared");
    }
    std::set<std::string> initial_names;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const InitialAgent& ia = agents[i];
        const std::string at = "scenario.agents[" + std::to_string(i) + "]";
        if (!roles.contains(ia.role)) {
            bad(at + ".role", "unknown role '" + ia.role + "'");
        }
        for (const auto& cap : ia.capabilities) {
            if (!parse_capability_kind(cap)) {
                bad(at + ".capabilities", "unknown capability '" + cap + "'");
            }
        }
        if (!initial_names.insert(ia.name).second) {
            bad(at + ".name", "duplicate agent name '" + ia.name + "'");
        }
        if (i == 0) {
            if (!ia.parent.empty()) {
                bad(at + ".parent", "the root takes no parent");
            }
        } else {
            if (!initial_names.contains(ia.parent) || ia.parent == ia.name) {
                bad(at + ".parent",
                    "parent '" + ia.parent +
                        "' is not an earlier initial agent");
            }
            auto mode = parse_memory_mode(ia.memory_mode);
            if (!mode || *mode == MemoryMode::inherit_partial) {
                bad(at + ".memory_mode",
                    "initial agents support inherit-full or agent-agnostic");
            }
        }
        auto life = parse_lifespan(ia.lifespan);
        auto inter = parse_interaction(ia.interaction);
        if (!life) bad(at + ".lifespan", "unknown lifespan '" + ia.lifespan + "'");
        if (!inter) {
            bad(at + ".interaction",
                "unknown interaction '" + ia.interaction + "'");
        }
        if (*inter == Interaction::session_based &&
            *life != Lifespan::persistent) {
            bad(at, "session-based agents must be persistent");
        }
    }
    for (const auto& w : workspace) {
        if (!w.label.empty() && !lat.find(w.label)) {
            bad("scenario.workspace." + w.name,
                "unknown label '" + w.label + "'");
        }
    }

    // Names an agent may carry in this scenario.
    std::set<std::string> known_agents = initial_names;
    for (const auto& [bname, behavior] : behaviors) {
        known_agents.insert(bname);
        for (const auto& step : behavior.steps) {
            if (step.kind == StepSpec::Kind::spawn) {
                known_agents.insert(step.child);
            }
        }
        for (const auto& t : behavior.on_keyword) {
            if (t.respond.kind == StepSpec::Kind::spawn) {
                known_agents.insert(t.respond.child);
            }
        }
    }

    auto check_step = [&](const StepSpec& step, const std::string& at) {
        switch (step.kind) {
            case StepSpec::Kind::spawn: {
                if (!roles.contains(step.role)) {
                    bad(at, "unknown role '" + step.role + "'");
                }
                for (const auto& cap : step.capabilities) {
                    // Explicit kill targets resolve at run time.
                    if (cap.rfind("kill:", 0) == 0) continue;
                    if (!parse_capability_kind(cap)) {
                        bad(at, "unknown capability '" + cap + "'");
                    }
                }
                if (!parse_memory_mode(step.memory_mode)) {
                    bad(at, "unknown memory mode '" + step.memory_mode + "'");
                }
                if (!parse_lifespan(step.lifespan)) {
                    bad(at, "unknown lifespan '" + step.lifespan + "'");
                }
                if (!parse_interaction(step.interaction)) {
                    bad(at, "unknown interaction '" + step.interaction + "'");
                }
                if (step.memory_mode == "inherit-partial" && !step.selector) {
                    bad(at, "inherit-partial requires a selector");
                }
                if (!behaviors.contains(step.child)) {
                    bad(at, "spawned agent '" + step.child +
                                "' has no behavior entry");
                }
                break;
            }
            case StepSpec::Kind::inject:
                if (!step.label.empty() && !lat.find(step.label)) {
                    bad(at, "unknown label '" + step.label + "'");
                }
                if (step.trigger && !tools.contains(step.trigger->tool)) {
                    bad(at, "trigger tool '" + step.trigger->tool +
                                "' not in the declared universe");
                }
                break;
            case StepSpec::Kind::invoke:
                if (!tools.contains(step.tool)) {
                    bad(at, "tool '" + step.tool +
                                "' not in the declared universe");
                }
                break;
            case StepSpec::Kind::write:
                if (!step.label.empty() && !lat.find(step.label)) {
                    bad(at, "unknown label '" + step.label + "'");
                }
                break;
            case StepSpec::Kind::request_terminate:
            case StepSpec::Kind::message:
                if (!known_agents.contains(step.target_agent)) {
                    bad(at, "unknown agent '" + step.target_agent + "'");
                }
                break;
            default:
                break;
        }
    };

    for (const auto& [bname, behavior] : behaviors) {
        const std::string at = "scenario.behaviors." + bname;
        std::size_t idx = 0;
        for (const auto& step : behavior.steps) {
            check_step(step, at + "[" + std::to_string(idx) + "]");
            ++idx;
        }
        for (const auto& t : behavior.on_keyword) {
            check_step(t.respond, at + ".on_keyword");
        }
    }
    for (const auto& name : schedule) {
        if (!known_agents.contains(name)) {
            bad("scenario.schedule", "unknown agent '" + name + "'");
        }
    }
}

}  // namespace masim
