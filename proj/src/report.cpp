#include "masim/report.hpp"

#include <sstream>

namespace masim {

nlohmann::json DefenseEvent::to_json() const {
    nlohmann::json j;
    j["kind"] = kind;
    j["actor"] = actor.value;
    j["at"] = at;
    j["detail"] = detail;
    return j;
}

nlohmann::json Report::to_json() const {
    nlohmann::json j;
    j["v"] = version;
    j["scenario"] = scenario;
    j["mode"] = mode;
    j["seed"] = seed;
    nlohmann::json violations_json = nlohmann::json::array();
    for (const auto& v : violations) violations_json.push_back(v.to_json());
    j["violations"] = violations_json;
    nlohmann::json defenses_json = nlohmann::json::array();
    for (const auto& d : defenses) defenses_json.push_back(d.to_json());
    j["defenses"] = defenses_json;
    j["informational"] = informational;
    j["stats"] = stats;
    if (expected_match) {
        j["expected_match"] = *expected_match;
    }
    j["trace_hash"] = trace_hash;
    return j;
}

std::map<std::string, int> Report::violation_counts() const {
    std::map<std::string, int> out;
    for (const auto& v : violations) {
        out[violation_kind_name(v.kind)] += 1;
    }
    return out;
}

std::map<std::string, int> Report::defense_counts() const {
    std::map<std::string, int> out;
    for (const auto& d : defenses) {
        out[d.kind] += 1;
    }
    return out;
}

std::string Report::to_text() const {
    std::ostringstream out;
    out << "run: " << scenario << "  mode=" << mode << "  seed=" << seed
        << "\n";
    out << "trace-hash: " << trace_hash << "\n";
    out << "violations: " << violations.size() << "\n";
    for (const auto& v : violations) {
        out << "  [t=" << v.at << "] " << violation_kind_name(v.kind)
            << " actor=" << v.actor.value << " " << v.detail.dump() << "\n";
    }
    out << "defenses: " << defenses.size() << "\n";
    for (const auto& d : defenses) {
        out << "  [t=" << d.at << "] " << d.kind << " actor=" << d.actor.value
            << " " << d.detail.dump() << "\n";
    }
    if (!informational.empty()) {
        out << "informational: " << informational.size() << "\n";
        for (const auto& i : informational) {
            out << "  " << i.dump() << "\n";
        }
    }
    out << "stats: " << stats.dump() << "\n";
    if (expected_match) {
        out << "expected-match: " << (*expected_match ? "yes" : "no") << "\n";
    }
    return out.str();
}

}  // namespace masim
