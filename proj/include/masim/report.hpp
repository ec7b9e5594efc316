#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "masim/invariants.hpp"

namespace masim {

// Enforcement action recorded during a run: a denial, a suspension, a
// spawn-time segment exclusion, or a blocked stale commit.
struct DefenseEvent {
    std::string kind;
    AgentId actor;
    LogicalTime at = 0;
    nlohmann::json detail = nlohmann::json::object();

    nlohmann::json to_json() const;
};

struct Report {
    int version = 1;
    std::string scenario;
    std::string mode;
    std::uint64_t seed = 0;
    std::vector<Violation> violations;
    std::vector<DefenseEvent> defenses;
    std::vector<nlohmann::json> informational;  // stale views, annotations
    nlohmann::json stats = nlohmann::json::object();
    std::optional<bool> expected_match;
    std::string trace_hash;

    nlohmann::json to_json() const;
    std::string to_text() const;

    std::map<std::string, int> violation_counts() const;
    std::map<std::string, int> defense_counts() const;
};

}  // namespace masim
