#pragma once

// Scenario files: roles, tool universe, initial workspace, per-agent scripted
// behaviors, the interleaving schedule, and per-mode expected outcomes.
// Grammar documented in docs/formats.md.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "masim/memory.hpp"

namespace masim {

struct TriggerSpec {
    std::string keyword;
    std::string tool;
    std::string target;
};

struct StepSpec {
    enum class Kind {
        spawn,
        inject,
        invoke,
        read,
        write,
        request_terminate,
        resolve_terminations,
        message,
        work,
        revoke,
    };

    Kind kind = Kind::work;

    // spawn
    std::string child;
    std::string role;
    std::vector<std::string> capabilities;
    std::string memory_mode = "agent-agnostic";
    std::optional<std::vector<std::string>> selector;  // parent segment names
    std::string lifespan = "one-time";
    std::string interaction = "task-oriented";

    // inject / write
    std::string segment;  // segment name
    std::string content;
    std::string label;  // empty = writer clearance
    std::optional<TriggerSpec> trigger;

    // invoke / read / write
    std::string tool;
    std::string target;
    std::vector<std::string> derived_from;
    bool own_store = false;

    // Skip the step unless the actor's cached read of `segment` equals
    // `value` (the agent acts on its own view, which is the point).
    struct IfCached {
        std::string segment;
        std::string value;
    };
    std::optional<IfCached> if_cached_equals;

    // request_terminate / message
    std::string target_agent;
    bool approve = false;
    std::string text;

    // work
    std::string note;
    int repeat = 1;

    nlohmann::json to_json() const;
    static StepSpec from_json(const nlohmann::json& j, const std::string& at);
};

const char* step_kind_name(StepSpec::Kind kind) noexcept;

struct BehaviorTrigger {
    std::string keyword;
    StepSpec respond;
};

struct AgentBehavior {
    std::vector<StepSpec> steps;
    std::vector<BehaviorTrigger> on_keyword;
};

struct RoleSpec {
    std::string clearance;
    std::set<std::string> tools;
};

// Agent present before the schedule starts. The first entry is the root
// orchestrator; later entries name an earlier entry as their parent and are
// spawned during setup.
struct InitialAgent {
    std::string name = "main";
    std::string role;
    std::vector<std::string> capabilities;
    std::string parent;  // empty for the root
    std::string memory_mode = "agent-agnostic";
    std::string lifespan = "persistent";
    std::string interaction = "session-based";
};

struct WorkspaceInit {
    std::string name;
    std::string content;
    std::string label;
};

struct ExpectedOutcome {
    // Exact per-kind violation counts; kinds not listed must not occur.
    std::map<std::string, int> violations;
    // Minimum per-kind defense event counts.
    std::map<std::string, int> defenses;
};

struct Scenario {
    std::string name;
    std::string description;
    std::vector<std::string> lattice;  // empty = default chain
    std::set<std::string> tools;
    std::map<std::string, RoleSpec> roles;
    std::vector<InitialAgent> agents;  // first entry is the root
    std::vector<WorkspaceInit> workspace;
    std::map<std::string, AgentBehavior> behaviors;
    std::vector<std::string> schedule;   // explicit step order by agent name
    std::string schedule_fallback = "round-robin";  // or "seeded"
    std::map<std::string, ExpectedOutcome> expected;  // keyed by mode name
    bool flat_deny_sibling_termination = false;

    InitialAgent& root();
    const InitialAgent& root() const;  // throws scenario_invalid when empty

    // Throws scenario_invalid with a field diagnostic.
    static Scenario from_json(const nlohmann::json& j);
    static Scenario from_file(const std::string& path);
    nlohmann::json to_json() const;

    // Reference resolution: roles, tools, labels, agent names.
    void validate() const;
};

}  // namespace masim
