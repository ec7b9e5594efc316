#include "masim/trace.hpp"

#include "masim/errors.hpp"
#include "masim/hash.hpp"

namespace masim {

namespace {

nlohmann::json parse_line(std::string_view line, std::size_t line_no) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        fail(Errc::scenario_invalid,
             "trace line " + std::to_string(line_no) + ": not a JSON object");
    }
    return j;
}

}  // namespace

nlohmann::json TraceEvent::to_json() const {
    nlohmann::json j;
    j["t"] = t;
    j["kind"] = kind;
    if (actor) {
        j["actor"] = actor->value;
    }
    j["detail"] = detail;
    return j;
}

TraceEvent TraceEvent::from_json(const nlohmann::json& j) {
    TraceEvent ev;
    ev.t = j.at("t").get<LogicalTime>();
    ev.kind = j.at("kind").get<std::string>();
    if (j.contains("actor")) {
        ev.actor = AgentId{j.at("actor").get<std::uint32_t>()};
    }
    ev.detail = j.value("detail", nlohmann::json::object());
    return ev;
}

std::string TraceEvent::line() const { return to_json().dump(); }

nlohmann::json TraceMeta::to_json() const {
    nlohmann::json j;
    j["v"] = version;
    j["kind"] = "meta";
    j["scenario"] = scenario;
    j["mode"] = mode;
    j["seed"] = seed;
    j["lattice"] = lattice;
    j["tools"] = tools;
    j["roles"] = roles;
    j["config"] = config;
    return j;
}

TraceMeta TraceMeta::from_json(const nlohmann::json& j) {
    TraceMeta m;
    m.version = j.at("v").get<int>();
    m.scenario = j.at("scenario").get<std::string>();
    m.mode = j.at("mode").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.lattice = j.at("lattice").get<std::vector<std::string>>();
    m.tools = j.value("tools", nlohmann::json::array());
    m.roles = j.value("roles", nlohmann::json::object());
    m.config = j.value("config", nlohmann::json::object());
    return m;
}

std::string TraceMeta::line() const { return to_json().dump(); }

std::string Trace::hash_hex() const {
    std::uint64_t h = kFnvOffsetBasis;
    h = fnv1a64(meta.line(), h);
    h = fnv1a64("\n", h);
    for (const auto& ev : events) {
        h = fnv1a64(ev.line(), h);
        h = fnv1a64("\n", h);
    }
    return hex64(h);
}

std::string Trace::to_ndjson(const nlohmann::json& summary) const {
    std::string out = meta.line();
    out += '\n';
    for (const auto& ev : events) {
        out += ev.line();
        out += '\n';
    }
    nlohmann::json footer = summary;
    footer["kind"] = "summary";
    footer["hash"] = hash_hex();
    out += footer.dump();
    out += '\n';
    return out;
}

ParsedTrace parse_trace(std::string_view text) {
    ParsedTrace out;
    std::size_t line_no = 0;
    bool saw_meta = false;
    bool saw_summary = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = parse_line(line, line_no);
        const std::string kind = j.value("kind", "");
        if (kind == "meta") {
            if (saw_meta) {
                fail(Errc::scenario_invalid,
                     "trace line " + std::to_string(line_no) +
                         ": duplicate meta line");
            }
            out.trace.meta = TraceMeta::from_json(j);
            saw_meta = true;
        } else if (kind == "summary") {
            out.summary = j;
            out.stored_hash = j.value("hash", "");
            saw_summary = true;
        } else {
            if (saw_summary) {
                fail(Errc::scenario_invalid,
                     "trace line " + std::to_string(line_no) +
                         ": event after summary footer");
            }
            out.trace.append(TraceEvent::from_json(j));
        }
    }
    if (!saw_meta) {
        fail(Errc::scenario_invalid, "trace: missing meta line");
    }
    if (!saw_summary) {
        fail(Errc::scenario_invalid, "trace: missing summary footer");
    }
    out.computed_hash = out.trace.hash_hex();
    return out;
}

}  // namespace masim
