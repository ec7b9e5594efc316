#pragma once

// Shared, append-only memory revision log.
//
// Invariants:
//   - Append-only: events are never modified, deleted, or reordered; the log
//     at any earlier time is a prefix of the current log.
//   - Event times strictly increase along the log.
//   - validity() is a pure function of (log, segment, reader time).

#include <cstdint>
#include <limits>
#include <vector>

#include "masim/ids.hpp"

namespace masim {

enum class RevisionOp { update, revoke };

const char* revision_op_name(RevisionOp op) noexcept;

struct RevisionEvent {
    RevisionOp op = RevisionOp::update;
    SegmentId seg;
    LogicalTime t = 0;
    AgentId author;

    bool operator==(const RevisionEvent&) const = default;
};

struct ValidityVerdict {
    enum class State { valid, stale, revoked };

    State state = State::valid;
    LogicalTime at = 0;  // earliest qualifying revoke/update time; 0 when valid

    bool ok() const { return state == State::valid; }
    bool operator==(const ValidityVerdict&) const = default;
};

const char* validity_name(ValidityVerdict::State state) noexcept;

class RevisionLog {
public:
    // Throws non_monotonic_time unless event.t exceeds the last event's t.
    void append(RevisionEvent event);

    // Revoked if a revoke for `seg` exists after reader_t0 (earliest such time
    // reported); else stale if an update exists after reader_t0; else valid.
    // Revoked dominates stale. Events after `horizon` are ignored, so post-hoc
    // analysis can evaluate validity as of a past commit.
    ValidityVerdict validity(
        SegmentId seg, LogicalTime reader_t0,
        LogicalTime horizon = std::numeric_limits<LogicalTime>::max()) const;

    // Events with from_t <= t <= to_t, in order. Throws bad_range.
    std::vector<RevisionEvent> audit(LogicalTime from_t, LogicalTime to_t) const;

    const std::vector<RevisionEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }

private:
    std::vector<RevisionEvent> events_;
};

std::uint64_t log_digest(const RevisionLog& log);

}  // namespace masim
