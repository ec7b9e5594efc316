#include "masim/network.hpp"

#include <algorithm>
#include <deque>

#include "masim/errors.hpp"

namespace masim {

const char* lifespan_name(Lifespan value) noexcept {
    switch (value) {
        case Lifespan::one_time: return "one-time";
        case Lifespan::persistent: return "persistent";
    }
    return "unknown";
}

std::optional<Lifespan> parse_lifespan(std::string_view text) {
    if (text == "one-time") return Lifespan::one_time;
    if (text == "persistent") return Lifespan::persistent;
    return std::nullopt;
}

const char* interaction_name(Interaction value) noexcept {
    switch (value) {
        case Interaction::session_based: return "session-based";
        case Interaction::task_oriented: return "task-oriented";
    }
    return "unknown";
}

std::optional<Interaction> parse_interaction(std::string_view text) {
    if (text == "session-based") return Interaction::session_based;
    if (text == "task-oriented") return Interaction::task_oriented;
    return std::nullopt;
}

const CachedRead* AgentRecord::last_read(SegmentId seg) const {
    for (const auto& r : reads) {
        if (r.seg == seg) return &r;
    }
    return nullptr;
}

const CachedRead* AgentRecord::last_read_named(std::string_view name) const {
    for (const auto& r : reads) {
        if (r.name == name) return &r;
    }
    return nullptr;
}

void AgentRecord::record_read(CachedRead read) {
    for (auto& r : reads) {
        if (r.seg == read.seg) {
            r = std::move(read);
            return;
        }
    }
    reads.push_back(std::move(read));
}

bool NetworkState::exists(AgentId id) const { return agents_.contains(id); }

const AgentRecord& NetworkState::agent(AgentId id) const {
    auto it = agents_.find(id);
    if (it == agents_.end()) {
        fail(Errc::unknown_agent,
             "unknown agent " + std::to_string(id.value));
    }
    return it->second;
}

AgentRecord& NetworkState::agent(AgentId id) {
    auto it = agents_.find(id);
    if (it == agents_.end()) {
        fail(Errc::unknown_agent,
             "unknown agent " + std::to_string(id.value));
    }
    return it->second;
}

bool NetworkState::has_edge(AgentId parent, AgentId child) const {
    return edges_.contains({parent, child});
}

std::optional<AgentId> NetworkState::parent_of(AgentId child) const {
    for (const auto& [p, c] : edges_) {
        if (c == child) return p;
    }
    return std::nullopt;
}

bool NetworkState::siblings(AgentId a, AgentId b) const {
    if (a == b) return false;
    auto pa = parent_of(a);
    auto pb = parent_of(b);
    return pa && pb && *pa == *pb;
}

std::vector<AgentId> NetworkState::children_of(AgentId parent) const {
    std::vector<AgentId> out;
    for (const auto& [p, c] : edges_) {
        if (p == parent) out.push_back(c);
    }
    return out;
}

std::set<AgentId> NetworkState::descendants(AgentId a) const {
    if (!exists(a)) {
        fail(Errc::unknown_agent,
             "unknown agent " + std::to_string(a.value));
    }
    std::set<AgentId> out;
    std::deque<AgentId> frontier{a};
    while (!frontier.empty()) {
        AgentId cur = frontier.front();
        frontier.pop_front();
        for (AgentId child : children_of(cur)) {
            if (out.insert(child).second) {
                frontier.push_back(child);
            }
        }
    }
    return out;
}

ValidationReport NetworkState::validate_arborescence() const {
    ValidationReport report;
    if (agents_.empty()) {
        return report;
    }
    if (!agents_.contains(root_)) {
        report.issues.push_back(
            {"missing-root", std::nullopt,
             "root " + std::to_string(root_.value) + " is not in the agent set"});
        return report;
    }

    // One pass over the edge set; the checks below run on the adjacency maps.
    std::map<AgentId, int> parent_count;
    std::map<AgentId, AgentId> first_parent;
    std::map<AgentId, std::vector<AgentId>> children;
    for (const auto& [p, c] : edges_) {
        parent_count[c] += 1;
        first_parent.emplace(c, p);
        children[p].push_back(c);
    }

    for (const auto& [id, rec] : agents_) {
        (void)rec;
        const int n = parent_count.contains(id) ? parent_count.at(id) : 0;
        if (id == root_) {
            if (n != 0) {
                report.issues.push_back(
                    {"duplicate-parent", id, "root has an incoming edge"});
            }
            continue;
        }
        if (n == 0) {
            report.issues.push_back(
                {"unreachable", id, "non-root agent has no parent"});
        } else if (n > 1) {
            report.issues.push_back(
                {"duplicate-parent", id,
                 "agent has " + std::to_string(n) + " parents"});
        }
    }

    // Reachability from root (also exposes cycles detached from the root).
    std::set<AgentId> reached{root_};
    std::deque<AgentId> frontier{root_};
    while (!frontier.empty()) {
        AgentId cur = frontier.front();
        frontier.pop_front();
        auto it = children.find(cur);
        if (it == children.end()) continue;
        for (AgentId c : it->second) {
            if (agents_.contains(c) && reached.insert(c).second) {
                frontier.push_back(c);
            }
        }
    }
    for (const auto& [id, rec] : agents_) {
        (void)rec;
        if (!reached.contains(id)) {
            // Distinguish a cycle among unreached nodes from a plain orphan.
            bool in_cycle = false;
            AgentId cur = id;
            for (std::size_t hops = 0; hops <= agents_.size(); ++hops) {
                auto p = first_parent.find(cur);
                if (p == first_parent.end()) break;
                if (p->second == id) {
                    in_cycle = true;
                    break;
                }
                cur = p->second;
            }
            const bool already_flagged =
                std::any_of(report.issues.begin(), report.issues.end(),
                            [&](const ValidationIssue& issue) {
                                return issue.node == id;
                            });
            if (in_cycle) {
                report.issues.push_back(
                    {"cycle", id, "agent participates in a parent cycle"});
            } else if (!already_flagged) {
                report.issues.push_back(
                    {"unreachable", id, "agent not reachable from root"});
            }
        }
    }
    return report;
}

AgentRecord& NetworkState::add_agent_raw(AgentRecord record) {
    AgentId id = record.id;
    auto [it, inserted] = agents_.emplace(id, std::move(record));
    if (!inserted) {
        fail(Errc::unknown_agent,
             "agent id " + std::to_string(id.value) + " already present");
    }
    if (id.value >= next_id_) {
        next_id_ = id.value + 1;
    }
    return it->second;
}

void NetworkState::add_edge_raw(AgentId parent, AgentId child) {
    edges_.insert({parent, child});
}

}  // namespace masim
