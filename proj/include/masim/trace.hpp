#pragma once

// Replayable run record. One event per line, each line self-describing:
// kind, actor, logical time, plus kind-specific detail. The first line holds
// run metadata, the last line a summary with the content hash of everything
// above it. Field names are frozen in docs/formats.md.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "masim/ids.hpp"

namespace masim {

struct TraceEvent {
    LogicalTime t = 0;
    std::string kind;
    std::optional<AgentId> actor;
    nlohmann::json detail = nlohmann::json::object();

    nlohmann::json to_json() const;
    static TraceEvent from_json(const nlohmann::json& j);
    std::string line() const;  // compact single-line JSON
};

struct TraceMeta {
    int version = 1;
    std::string scenario;
    std::string mode;  // "permissive" | "enforced"
    std::uint64_t seed = 0;
    std::vector<std::string> lattice;
    nlohmann::json tools = nlohmann::json::array();
    nlohmann::json roles = nlohmann::json::object();
    nlohmann::json config = nlohmann::json::object();

    nlohmann::json to_json() const;
    static TraceMeta from_json(const nlohmann::json& j);
    std::string line() const;
};

class Trace {
public:
    TraceMeta meta;
    std::vector<TraceEvent> events;

    void append(TraceEvent event) { events.push_back(std::move(event)); }

    // fnv1a-64 hex over the meta line and every event line (newline included),
    // i.e. everything a tamper check must cover.
    std::string hash_hex() const;

    // Full NDJSON document: meta, events, then a summary footer carrying the
    // hash plus the verdicts recomputable from the lines above.
    std::string to_ndjson(const nlohmann::json& summary) const;
};

struct ParsedTrace {
    Trace trace;
    nlohmann::json summary;      // footer as stored (hash field included)
    std::string stored_hash;     // from the footer
    std::string computed_hash;   // recomputed from the parsed lines
};

// Throws scenario_invalid with a line diagnostic on malformed input.
ParsedTrace parse_trace(std::string_view ndjson_text);

}  // namespace masim
