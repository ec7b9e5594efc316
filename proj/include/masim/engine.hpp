#pragma once

// Deterministic discrete-event driver: scripted agents, one kernel entry per
// step, explicit or seeded interleaving. Given (scenario, mode, seed) the
// produced trace is byte-identical across runs.

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "masim/kernel.hpp"
#include "masim/report.hpp"
#include "masim/scenario.hpp"

namespace masim {

struct RunResult {
    Trace trace;
    Report report;
    std::shared_ptr<Kernel> kernel;  // final state, for inspection
    std::string ndjson;              // full trace document incl. summary
};

class Scheduler {
public:
    Scheduler(const Scenario& scenario, Kernel& kernel, std::uint64_t seed);

    // Applies exactly one agent action; the clock advances by one and at
    // least one trace event is appended. Throws no_runnable_step when no
    // agent has a pending step.
    void step();

    bool has_runnable() const;
    // Total steps applied so far.
    std::uint64_t steps_applied() const { return steps_applied_; }
    // Name of the agent the next step would run, for tests.
    std::string peek_next() const;

    void run_to_completion();

    // Binds a live agent to its scripted behavior; the engine calls this for
    // the root, spawn steps call it for children.
    void attach_agent(AgentId id, const std::string& name);

private:
    struct AgentQueue {
        AgentId id;
        std::string name;
        std::deque<StepSpec> steps;
        std::vector<BehaviorTrigger> triggers;
    };

    AgentQueue* queue_for(AgentId id);
    AgentQueue* queue_named(const std::string& name);
    AgentQueue* pick_next();
    bool runnable(const AgentQueue& q) const;

    void execute(AgentQueue& q, const StepSpec& step);
    AgentId resolve_agent(const std::string& name) const;

    const Scenario& scenario_;
    Kernel& kernel_;
    std::vector<AgentQueue> queues_;         // in spawn order
    std::map<std::string, AgentId> by_name_;
    std::vector<std::string> schedule_;
    std::size_t schedule_pos_ = 0;
    bool seeded_fallback_ = false;
    std::mt19937_64 rng_;
    std::size_t rotation_pos_ = 0;
    std::uint64_t steps_applied_ = 0;
};

class Engine {
public:
    // Throws scenario_invalid / deadlock_detected.
    RunResult run(const Scenario& scenario, EnforcementMode mode,
                  std::uint64_t seed) const;
};

// Trace post-processing shared by fresh runs and replay verification.
std::vector<DefenseEvent> extract_defenses(const Trace& trace);
nlohmann::json run_stats(const Trace& trace, const Kernel& kernel);
nlohmann::json summary_json(const Report& report,
                            const std::set<AgentId>& contamination,
                            const std::string& state_digest_hex);
bool outcomes_match(const Report& report, const Scenario& scenario,
                    EnforcementMode mode);

}  // namespace masim
