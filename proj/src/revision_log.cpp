#include "masim/revision_log.hpp"

#include <string>

#include "masim/errors.hpp"
#include "masim/hash.hpp"

namespace masim {

const char* revision_op_name(RevisionOp op) noexcept {
    switch (op) {
        case RevisionOp::update: return "update";
        case RevisionOp::revoke: return "revoke";
    }
    return "unknown";
}

const char* validity_name(ValidityVerdict::State state) noexcept {
    switch (state) {
        case ValidityVerdict::State::valid: return "valid";
        case ValidityVerdict::State::stale: return "stale";
        case ValidityVerdict::State::revoked: return "revoked";
    }
    return "unknown";
}

void RevisionLog::append(RevisionEvent event) {
    if (!events_.empty() && event.t <= events_.back().t) {
        fail(Errc::non_monotonic_time,
             "revision event at t=" + std::to_string(event.t) +
                 " not after t=" + std::to_string(events_.back().t));
    }
    events_.push_back(event);
}

ValidityVerdict RevisionLog::validity(SegmentId seg, LogicalTime reader_t0,
                                      LogicalTime horizon) const {
    ValidityVerdict verdict;
    for (const auto& ev : events_) {
        if (ev.t > horizon) break;  // ordered, so nothing later qualifies
        if (ev.seg != seg || ev.t <= reader_t0) continue;
        if (ev.op == RevisionOp::revoke) {
            return {ValidityVerdict::State::revoked, ev.t};
        }
        if (verdict.state == ValidityVerdict::State::valid) {
            verdict = {ValidityVerdict::State::stale, ev.t};
        }
    }
    return verdict;
}

std::vector<RevisionEvent> RevisionLog::audit(LogicalTime from_t,
                                              LogicalTime to_t) const {
    if (from_t > to_t) {
        fail(Errc::bad_range, "audit range [" + std::to_string(from_t) + ", " +
                                  std::to_string(to_t) + "] is inverted");
    }
    std::vector<RevisionEvent> out;
    for (const auto& ev : events_) {
        if (ev.t >= from_t && ev.t <= to_t) {
            out.push_back(ev);
        }
    }
    return out;
}

std::uint64_t log_digest(const RevisionLog& log) {
    std::uint64_t h = kFnvOffsetBasis;
    for (const auto& ev : log.events()) {
        h = fnv1a64(std::string(revision_op_name(ev.op)) + ":" +
                        std::to_string(ev.seg.value) + ":" +
                        std::to_string(ev.t) + ":" +
                        std::to_string(ev.author.value) + ";",
                    h);
    }
    return h;
}

}  // namespace masim
