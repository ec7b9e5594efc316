#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace masim {

// Global logical clock value. Every kernel entry advances it by exactly one;
// all trace and revision events produced by that entry carry the same stamp.
using LogicalTime = std::uint64_t;

// Monotonically allocated per run; never reused, including after termination.
struct AgentId {
    std::uint32_t value = 0;
    auto operator<=>(const AgentId&) const = default;
};

// Allocation-unique per run. Inherited copies of a segment keep the origin's
// id: the id names the logical segment, not the physical copy, so revocation
// and staleness checks reach every replica.
struct SegmentId {
    std::uint64_t value = 0;
    auto operator<=>(const SegmentId&) const = default;
};

}  // namespace masim

template <>
struct std::hash<masim::AgentId> {
    std::size_t operator()(const masim::AgentId& id) const noexcept {
        return std::hash<std::uint32_t>{}(id.value);
    }
};

template <>
struct std::hash<masim::SegmentId> {
    std::size_t operator()(const masim::SegmentId& id) const noexcept {
        return std::hash<std::uint64_t>{}(id.value);
    }
};
